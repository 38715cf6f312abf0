"""Deterministic synthetic corpus: fund styles x quarters x GICS sectors.

Three stylized equity funds (defensive, growth, value) each get four
quarterly reports over twelve GICS sectors including Cash. Weights land on a
4-dp grid and sum to exactly 1 per side; Cash carries no benchmark weight or
return. The whole corpus is a pure function of the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .records import HoldingRecord, ReportSlice

GICS_SECTORS = (
    "Energy",
    "Materials",
    "Industrials",
    "Consumer Discret.",
    "Consumer Staples",
    "Health Care",
    "Financials",
    "IT",
    "Communication",
    "Utilities",
    "Real Estate",
    "Cash",
)

SECTOR_PARENTS = {
    "Energy": "Sensitive",
    "Industrials": "Sensitive",
    "IT": "Sensitive",
    "Communication": "Sensitive",
    "Materials": "Cyclical",
    "Consumer Discret.": "Cyclical",
    "Financials": "Cyclical",
    "Real Estate": "Cyclical",
    "Consumer Staples": "Defensive",
    "Health Care": "Defensive",
    "Utilities": "Defensive",
    "Cash": "Defensive",
}

QUARTER_LABELS = (
    "1/31/2022 to 3/31/2022",
    "4/1/2022 to 6/30/2022",
    "7/1/2022 to 9/30/2022",
    "10/1/2022 to 12/31/2022",
)

RETURN_CAP = 0.15
CASH_PORTFOLIO_RETURN = 0.0038
# Active-weight noise stays well below the smallest deliberate tilt so a
# style's direction on a tilted sector can never flip.
WEIGHT_NOISE = 0.002


@dataclass(frozen=True)
class FundStyleSpec:
    """One stylized fund: per-sector active-weight tilts and return noise."""

    name: str
    tilts: Mapping[str, float]
    return_dispersion: float

    def validate(self) -> None:
        unknown = set(self.tilts) - set(GICS_SECTORS)
        if unknown:
            raise ValueError(f"style {self.name!r} tilts unknown sectors: {sorted(unknown)}")
        residual = math.fsum(self.tilts.values())
        if abs(residual) > 1e-9:
            raise ValueError(
                f"style {self.name!r} tilts sum to {residual:+.3e}, expected 0"
            )

    def tilt(self, sector: str) -> float:
        return self.tilts.get(sector, 0.0)


DEFAULT_STYLES = (
    FundStyleSpec(
        name="Defensive",
        tilts={
            "Consumer Staples": 0.050,
            "Utilities": 0.060,
            "Health Care": 0.025,
            "Real Estate": 0.030,
            "Cash": 0.015,
            "Energy": -0.035,
            "Materials": -0.030,
            "Industrials": -0.025,
            "Consumer Discret.": -0.005,
            "Financials": -0.055,
            "IT": -0.025,
            "Communication": -0.005,
        },
        return_dispersion=0.008,
    ),
    FundStyleSpec(
        name="Growth",
        tilts={
            "IT": 0.060,
            "Consumer Discret.": 0.040,
            "Communication": 0.030,
            "Cash": 0.010,
            "Energy": -0.030,
            "Materials": -0.025,
            "Consumer Staples": -0.030,
            "Financials": -0.020,
            "Utilities": -0.030,
            "Health Care": -0.005,
        },
        return_dispersion=0.020,
    ),
    FundStyleSpec(
        name="Value",
        tilts={
            "Utilities": 0.050,
            "Health Care": 0.040,
            "Financials": 0.030,
            "Energy": 0.020,
            "Cash": 0.010,
            "IT": -0.060,
            "Consumer Discret.": -0.040,
            "Communication": -0.025,
            "Real Estate": -0.015,
            "Materials": -0.010,
        },
        return_dispersion=0.015,
    ),
)


def round_weights(weights: Sequence[float], places: int = 4) -> list[float]:
    """Round weights to a decimal grid, preserving an exact sum of 1.

    Largest-remainder correction: floor everything onto the grid, then hand
    the leftover grid units to the largest fractional remainders (ties broken
    by position, so the result is deterministic).
    """
    scale = 10**places
    units = [w * scale for w in weights]
    floors = [math.floor(u) for u in units]
    shortfall = scale - sum(floors)
    if shortfall < 0 or shortfall > len(weights):
        raise ValueError(f"weights sum to {math.fsum(weights)!r}, cannot grid-round")
    order = sorted(range(len(weights)), key=lambda i: (floors[i] - units[i], i))
    for i in order[:shortfall]:
        floors[i] += 1
    return [f / scale for f in floors]


def _benchmark_weights(rng: np.random.Generator, sectors: Sequence[str]) -> list[float]:
    invested = [s for s in sectors if s != "Cash"]
    base = 1.0 / len(invested)
    raw = {s: base + rng.uniform(-0.02, 0.02) for s in invested}
    total = math.fsum(raw.values())
    weights = [raw[s] / total if s != "Cash" else 0.0 for s in sectors]
    return round_weights(weights)


def _portfolio_weights(
    rng: np.random.Generator,
    style: FundStyleSpec,
    sectors: Sequence[str],
    benchmark: Sequence[float],
) -> list[float]:
    raw: list[float] = []
    for sector, bench_w in zip(sectors, benchmark):
        weight = bench_w + style.tilt(sector)
        if sector != "Cash":
            weight += rng.uniform(-WEIGHT_NOISE, WEIGHT_NOISE)
        if weight < 0:
            raise ValueError(
                f"style {style.name!r} tilt drives {sector!r} weight below zero "
                f"({weight:.4f}); tilt map is infeasible for this benchmark"
            )
        raw.append(weight)
    total = math.fsum(raw)
    return round_weights([w / total for w in raw])


def _returns(
    rng: np.random.Generator, style: FundStyleSpec, sectors: Sequence[str]
) -> list[tuple[float, float]]:
    """Per-sector (benchmark, portfolio) returns for one quarter."""
    drift = rng.normal(0.01, 0.02)
    out: list[tuple[float, float]] = []
    for sector in sectors:
        if sector == "Cash":
            out.append((0.0, CASH_PORTFOLIO_RETURN))
            continue
        bench = float(np.clip(rng.normal(drift, 0.03), -RETURN_CAP, RETURN_CAP))
        port = float(
            np.clip(bench + rng.normal(0.0, style.return_dispersion), -RETURN_CAP, RETURN_CAP)
        )
        out.append((round(bench, 4), round(port, 4)))
    return out


def generate_corpus(
    seed: int,
    styles: Sequence[FundStyleSpec] = DEFAULT_STYLES,
    periods: Sequence[str] = QUARTER_LABELS,
) -> list[ReportSlice]:
    """Generate one validated slice per (style, period), deterministically."""
    for style in styles:
        style.validate()
    rng = np.random.default_rng(seed)
    slices: list[ReportSlice] = []
    for style in styles:
        fund = f"Portfolio {style.name}"
        benchmark = f"Benchmark {style.name}"
        for period in periods:
            bench_weights = _benchmark_weights(rng, GICS_SECTORS)
            port_weights = _portfolio_weights(rng, style, GICS_SECTORS, bench_weights)
            sector_returns = _returns(rng, style, GICS_SECTORS)
            records = tuple(
                HoldingRecord(
                    group=sector,
                    parent_group=SECTOR_PARENTS[sector],
                    portfolio_weight=port_weights[i],
                    benchmark_weight=bench_weights[i],
                    portfolio_return=sector_returns[i][1],
                    benchmark_return=sector_returns[i][0],
                    period=period,
                    fund=fund,
                    benchmark=benchmark,
                )
                for i, sector in enumerate(GICS_SECTORS)
            )
            holdings = ReportSlice(fund, period, records)
            holdings.validate()
            slices.append(holdings)
    return slices
