"""Shared fixtures: sample report files, worked examples, random slices."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from perfattrib.records import HoldingRecord, ReportSlice

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def sample_obj1_path() -> Path:
    return DATA_DIR / "sample_objective1.csv"


@pytest.fixture
def sample_obj2_path() -> Path:
    return DATA_DIR / "sample_objective2.csv"


def _manager_record(group, parent, pw, pr, bw, br) -> HoldingRecord:
    return HoldingRecord(
        group=group,
        parent_group=parent,
        portfolio_weight=pw,
        benchmark_weight=bw,
        portfolio_return=pr,
        benchmark_return=br,
        period="2022",
        fund="Multi-Manager Fund",
        benchmark="Composite Benchmark",
    )


@pytest.fixture
def manager_example() -> ReportSlice:
    """Two-manager mandate with value/growth segments, hand-checked numbers."""
    records = (
        _manager_record(
            "Small-cap value equities", "Value Portfolio Manager", 0.20, 0.0239, 0.25, 0.0152
        ),
        _manager_record(
            "Large-cap value equities", "Value Portfolio Manager", 0.58, 0.0051, 0.50, -0.0028
        ),
        _manager_record(
            "Large-cap growth equities", "Growth Portfolio Manager", 0.22, 0.0082, 0.25, -0.0108
        ),
    )
    return ReportSlice("Multi-Manager Fund", "2022", records)


@pytest.fixture
def exam_slice() -> ReportSlice:
    """Three-sector exam table: consumer-goods allocation works out to 0.0024."""
    rows = (
        ("Health Care", 0.10, 0.20, 0.03, 0.02),
        ("Utilities", 0.30, 0.30, 0.04, 0.04),
        ("Consumer Goods", 0.60, 0.50, 0.07, 0.08),
    )
    records = tuple(
        HoldingRecord(
            group=name,
            parent_group="Equities",
            portfolio_weight=pw,
            benchmark_weight=bw,
            portfolio_return=pr,
            benchmark_return=br,
            period="FY2023",
            fund="Exam Fund",
            benchmark="Exam Benchmark",
        )
        for name, pw, bw, pr, br in rows
    )
    return ReportSlice("Exam Fund", "FY2023", records)


def build_random_slice(
    rng: np.random.Generator, index: int, with_parents: bool = True
) -> ReportSlice:
    """A random valid slice: grid weights summing to exactly one per side."""
    n = int(rng.integers(3, 12))
    port_units = rng.multinomial(10000 - n, rng.dirichlet(np.ones(n))) + 1
    bench_units = rng.multinomial(10000 - n, rng.dirichlet(np.ones(n))) + 1
    parents = [f"Group {int(g)}" for g in rng.integers(0, 3, size=n)]
    fund, period = f"Fund {index}", f"P{index}"
    records = tuple(
        HoldingRecord(
            group=f"Sector {i}",
            parent_group=parents[i] if with_parents else None,
            portfolio_weight=int(port_units[i]) / 10000,
            benchmark_weight=int(bench_units[i]) / 10000,
            portfolio_return=int(rng.integers(-1500, 1501)) / 10000,
            benchmark_return=int(rng.integers(-1500, 1501)) / 10000,
            period=period,
            fund=fund,
            benchmark=f"Benchmark {index}",
        )
        for i in range(n)
    )
    return ReportSlice(fund, period, records)


@st.composite
def slice_strategy(draw, min_groups: int = 2, max_groups: int = 8) -> ReportSlice:
    """Hypothesis strategy over valid slices with parent groups."""
    n = draw(st.integers(min_groups, max_groups))
    port_units = draw(st.lists(st.integers(1, 10000), min_size=n, max_size=n))
    bench_units = draw(st.lists(st.integers(1, 10000), min_size=n, max_size=n))
    port_returns = draw(st.lists(st.integers(-1500, 1500), min_size=n, max_size=n))
    bench_returns = draw(st.lists(st.integers(-1500, 1500), min_size=n, max_size=n))
    parent_picks = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    port_total = sum(port_units)
    bench_total = sum(bench_units)
    records = tuple(
        HoldingRecord(
            group=f"Sector {i}",
            parent_group=f"Group {parent_picks[i]}",
            portfolio_weight=port_units[i] / port_total,
            benchmark_weight=bench_units[i] / bench_total,
            portfolio_return=port_returns[i] / 10000,
            benchmark_return=bench_returns[i] / 10000,
            period="P1",
            fund="Fund H",
            benchmark="Benchmark H",
        )
        for i in range(n)
    )
    return ReportSlice("Fund H", "P1", records)
