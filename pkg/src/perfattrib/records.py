"""Core domain records shared across the attribution engine and the harness.

All weights and returns are decimal fractions (0.0370 means 3.70%), never
percent strings. Records are immutable; every computation is a pure function
of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Loose enough to accept 4-dp report data re-normalized in binary floats,
# tight enough to reject genuinely broken weight columns.
WEIGHT_SUM_TOL = 1e-9


class ValidationError(ValueError):
    """A holdings slice violates a structural invariant."""


class Level(Enum):
    SECTOR = "Sector"
    PARENT = "Parent"
    TOTAL = "Total"


class Mode(Enum):
    SINGLE_LEVEL = "SingleLevel"
    MICRO = "Micro"
    MACRO = "Macro"


class Side(Enum):
    PORTFOLIO = "Portfolio"
    BENCHMARK = "Benchmark"


class EffectType(Enum):
    ALLOCATION = "Allocation"
    SELECTION = "Selection"
    TOTAL = "Total"


@dataclass(frozen=True)
class HoldingRecord:
    """One (fund, period, group) row of weights and returns.

    ``parent_group`` is the optional higher aggregation level (e.g. a GICS
    type above a GICS sector); it is required for multi-level computation.
    """

    group: str
    portfolio_weight: float
    benchmark_weight: float
    portfolio_return: float
    benchmark_return: float
    period: str
    fund: str
    benchmark: str
    parent_group: str | None = None


@dataclass(frozen=True)
class ReportSlice:
    """All holdings of one fund over one period, in report order."""

    fund: str
    period: str
    records: tuple[HoldingRecord, ...]

    def validate(self) -> None:
        """Check the long-only single-period invariants.

        Raises:
            ValidationError: empty slice, mixed fund/period labels,
                duplicate group labels, negative weights, or either weight
                column not summing to 1 within ``WEIGHT_SUM_TOL``.
        """
        if not self.records:
            raise ValidationError(f"slice {self.fund!r}/{self.period!r} has no records")
        seen: set[str] = set()
        for rec in self.records:
            if rec.fund != self.fund or rec.period != self.period:
                raise ValidationError(
                    f"record {rec.group!r} belongs to {rec.fund!r}/{rec.period!r}, "
                    f"not {self.fund!r}/{self.period!r}"
                )
            if rec.group in seen:
                raise ValidationError(
                    f"duplicate group {rec.group!r} in {self.fund!r}/{self.period!r}"
                )
            seen.add(rec.group)
            if rec.portfolio_weight < 0 or rec.benchmark_weight < 0:
                raise ValidationError(
                    f"negative weight on {rec.group!r} in {self.fund!r}/{self.period!r}"
                )
        for side, total in (
            ("portfolio", math.fsum(r.portfolio_weight for r in self.records)),
            ("benchmark", math.fsum(r.benchmark_weight for r in self.records)),
        ):
            if abs(total - 1.0) > WEIGHT_SUM_TOL:
                raise ValidationError(
                    f"{side} weights of {self.fund!r}/{self.period!r} sum to "
                    f"{total:.12f} (residual {total - 1.0:+.3e})"
                )

    def require_parents(self) -> None:
        """Raise unless every record carries a parent group."""
        for rec in self.records:
            if rec.parent_group is None:
                raise ValidationError(
                    f"record {rec.group!r} in {self.fund!r}/{self.period!r} "
                    "has no parent group"
                )

    def parent_order(self) -> list[str]:
        """Distinct parent labels in order of first appearance."""
        order: list[str] = []
        for rec in self.records:
            if rec.parent_group is not None and rec.parent_group not in order:
                order.append(rec.parent_group)
        return order


@dataclass(frozen=True)
class AttributionRow:
    """Allocation/selection effects for one group at one level.

    The total contribution is always derived, never stored, so it can never
    drift from its parts.
    """

    level: Level
    group: str
    allocation: float
    selection: float
    fund: str
    period: str

    @property
    def total(self) -> float:
        return self.allocation + self.selection


@dataclass(frozen=True)
class AttributionTable:
    """One computed attribution report (group rows plus a Total row)."""

    rows: tuple[AttributionRow, ...]
    mode: Mode
    benchmark_total_return: float
    portfolio_total_return: float

    def sector_rows(self) -> tuple[AttributionRow, ...]:
        return tuple(r for r in self.rows if r.level is Level.SECTOR)

    def parent_rows(self) -> tuple[AttributionRow, ...]:
        return tuple(r for r in self.rows if r.level is Level.PARENT)

    def total_row(self) -> AttributionRow:
        for row in self.rows:
            if row.level is Level.TOTAL:
                return row
        raise ValueError("table has no Total row")
