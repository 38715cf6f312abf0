"""Keyword factors behind each effect and the prescriptive analyst sentences.

Every effect is explained by a small keyword combination: the active-weight
stance, the relative-performance stance, and the resulting sign. The sentence
renderer instantiates one fixed skeleton per effect so output is fully
deterministic and machine-gradable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import attribution
from .records import EffectType, ReportSlice

# Sign tolerance on weight/return differences; exact zero is unattainable in
# binary floats.
EPSILON = 1e-12


class WeightStance(Enum):
    OVERWEIGHT = "Overweight"
    UNDERWEIGHT = "Underweight"
    NEUTRAL = "Neutral"


class PerformanceStance(Enum):
    OUTPERFORMANCE = "Outperformance"
    UNDERPERFORMANCE = "Underperformance"
    NEUTRAL = "Neutral"
    # Selection with zero portfolio weight: no holding, so no performance
    # reading either way.
    NO_EXPOSURE = "No exposure"


class EffectSign(Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    ZERO = "Zero"


@dataclass(frozen=True)
class FactorAssessment:
    """The keyword triple explaining one effect of one sector.

    ``weight_stance`` is None for selection rows (the report vocabulary
    writes the literal word "None" there).
    """

    sector: str
    effect_type: EffectType
    value: float
    weight_stance: WeightStance | None
    performance_stance: PerformanceStance
    sign: EffectSign


def _stance(diff: float, positive: object, negative: object, neutral: object):
    if diff > EPSILON:
        return positive
    if diff < -EPSILON:
        return negative
    return neutral


def sign_from_stances(
    effect_type: EffectType,
    weight_stance: WeightStance | None,
    performance_stance: PerformanceStance,
) -> EffectSign:
    """Effect sign implied by the keyword combination alone."""
    if effect_type is EffectType.SELECTION:
        if performance_stance is PerformanceStance.OUTPERFORMANCE:
            return EffectSign.POSITIVE
        if performance_stance is PerformanceStance.UNDERPERFORMANCE:
            return EffectSign.NEGATIVE
        return EffectSign.ZERO
    if weight_stance is WeightStance.NEUTRAL or performance_stance in (
        PerformanceStance.NEUTRAL,
        PerformanceStance.NO_EXPOSURE,
    ):
        return EffectSign.ZERO
    same_direction = (weight_stance is WeightStance.OVERWEIGHT) == (
        performance_stance is PerformanceStance.OUTPERFORMANCE
    )
    return EffectSign.POSITIVE if same_direction else EffectSign.NEGATIVE


def classify_allocation(
    sector: str, w: float, bench_w: float, group_b: float, total_b: float
) -> FactorAssessment:
    """Classify one allocation effect into its keyword combination.

    Overweighting a group whose benchmark return beats the overall benchmark
    is positive, as is underweighting one that lags it; mixed directions are
    negative and any neutral leg zeroes the effect.
    """
    weight_stance = _stance(
        w - bench_w, WeightStance.OVERWEIGHT, WeightStance.UNDERWEIGHT, WeightStance.NEUTRAL
    )
    performance_stance = _stance(
        group_b - total_b,
        PerformanceStance.OUTPERFORMANCE,
        PerformanceStance.UNDERPERFORMANCE,
        PerformanceStance.NEUTRAL,
    )
    return FactorAssessment(
        sector=sector,
        effect_type=EffectType.ALLOCATION,
        value=attribution.allocation_effect(w, bench_w, group_b, total_b),
        weight_stance=weight_stance,
        performance_stance=performance_stance,
        sign=sign_from_stances(EffectType.ALLOCATION, weight_stance, performance_stance),
    )


def classify_selection(sector: str, w: float, group_r: float, group_b: float) -> FactorAssessment:
    """Classify one selection effect; zero weight means no exposure at all."""
    if w <= EPSILON:
        performance_stance = PerformanceStance.NO_EXPOSURE
    else:
        performance_stance = _stance(
            group_r - group_b,
            PerformanceStance.OUTPERFORMANCE,
            PerformanceStance.UNDERPERFORMANCE,
            PerformanceStance.NEUTRAL,
        )
    return FactorAssessment(
        sector=sector,
        effect_type=EffectType.SELECTION,
        value=attribution.selection_effect(w, group_r, group_b),
        weight_stance=None,
        performance_stance=performance_stance,
        sign=sign_from_stances(EffectType.SELECTION, None, performance_stance),
    )


def total_sign(allocation: float, selection: float) -> EffectSign:
    """Sign of the combined contribution under the shared tolerance."""
    total = allocation + selection
    if total > EPSILON:
        return EffectSign.POSITIVE
    if total < -EPSILON:
        return EffectSign.NEGATIVE
    return EffectSign.ZERO


_SIGN_WORDS = {
    EffectSign.POSITIVE: "positive",
    EffectSign.NEGATIVE: "negative",
    EffectSign.ZERO: "zero",
}
_WEIGHT_WORDS = {
    WeightStance.OVERWEIGHT: "overweight",
    WeightStance.UNDERWEIGHT: "underweight",
    WeightStance.NEUTRAL: "neutral",
}
_PERFORMANCE_WORDS = {
    PerformanceStance.OUTPERFORMANCE: "outperformed",
    PerformanceStance.UNDERPERFORMANCE: "underperformed",
    PerformanceStance.NEUTRAL: "neutral",
    PerformanceStance.NO_EXPOSURE: "no exposure",
}


def render_sentences(
    assessment_pair: tuple[FactorAssessment, FactorAssessment],
    group_b: float,
    total_b: float,
    group_r: float,
) -> tuple[str, str]:
    """Render the two prescriptive bullets for one sector.

    The pair must be (allocation, selection) for the same sector. Numeric
    slots are 4-dp decimal fractions; stance slots are lowercase keywords.
    """
    alloc, sel = assessment_pair
    if alloc.effect_type is not EffectType.ALLOCATION or sel.effect_type is not EffectType.SELECTION:
        raise ValueError("assessment pair must be (allocation, selection)")
    if alloc.sector != sel.sector:
        raise ValueError(f"mismatched sectors {alloc.sector!r} vs {sel.sector!r}")
    allocation_bullet = (
        f"- The '{alloc.sector}' sector had a '{_SIGN_WORDS[alloc.sign]}' allocation effect "
        f"of '{_fmt4(alloc.value)}'. This was due to the fund being "
        f"'{_WEIGHT_WORDS[alloc.weight_stance]}' in this sector compared to the benchmark "
        f"and due to the fact that the benchmark return of '{_fmt4(group_b)}' compared to "
        f"the benchmark total return of '{_fmt4(total_b)}' "
        f"'{_PERFORMANCE_WORDS[alloc.performance_stance]}'."
    )
    selection_bullet = (
        f"- The '{sel.sector}' sector also had a '{_SIGN_WORDS[sel.sign]}' selection effect "
        f"of '{_fmt4(sel.value)}'. The fund's investments in this sector "
        f"'{_PERFORMANCE_WORDS[sel.performance_stance]}' compared to the sector benchmark "
        f"(Portfolio Return: '{_fmt4(group_r)}' vs Benchmark Return: '{_fmt4(group_b)}')."
    )
    return allocation_bullet, selection_bullet


def _fmt4(value: float) -> str:
    return f"{value if value != 0 else 0.0:.4f}"


def ground_truth_factors(report_slice: ReportSlice) -> list[FactorAssessment]:
    """Grading key: one allocation and one selection assessment per sector."""
    report_slice.validate()
    total_b = attribution.benchmark_total_return(report_slice)
    out: list[FactorAssessment] = []
    for rec in report_slice.records:
        out.append(
            classify_allocation(
                rec.group, rec.portfolio_weight, rec.benchmark_weight,
                rec.benchmark_return, total_b,
            )
        )
        out.append(
            classify_selection(
                rec.group, rec.portfolio_weight, rec.portfolio_return, rec.benchmark_return
            )
        )
    return out
