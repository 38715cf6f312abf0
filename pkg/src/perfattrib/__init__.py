"""Brinson-Fachler attribution engine with a deterministic analyst benchmark."""

from .attribution import (
    allocation_effect,
    benchmark_total_return,
    compute_macro,
    compute_micro,
    compute_single_level,
    portfolio_total_return,
    segment_return,
    selection_effect,
)
from .factors import (
    EffectSign,
    FactorAssessment,
    PerformanceStance,
    WeightStance,
    classify_allocation,
    classify_selection,
    ground_truth_factors,
    render_sentences,
    total_sign,
)
from .records import (
    AttributionRow,
    AttributionTable,
    EffectType,
    HoldingRecord,
    Level,
    Mode,
    ReportSlice,
    Side,
    ValidationError,
)

__all__ = [
    "AttributionRow",
    "AttributionTable",
    "EffectSign",
    "EffectType",
    "FactorAssessment",
    "HoldingRecord",
    "Level",
    "Mode",
    "PerformanceStance",
    "ReportSlice",
    "Side",
    "ValidationError",
    "WeightStance",
    "allocation_effect",
    "benchmark_total_return",
    "classify_allocation",
    "classify_selection",
    "compute_macro",
    "compute_micro",
    "compute_single_level",
    "ground_truth_factors",
    "portfolio_total_return",
    "render_sentences",
    "segment_return",
    "selection_effect",
    "total_sign",
]
