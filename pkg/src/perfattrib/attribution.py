"""Brinson-Fachler effect computation at single, micro, and macro level.

Interaction is folded into selection, so for every group
``total = allocation + selection`` and group totals sum to the arithmetic
excess return ``r - b``. Micro mode aggregates lowest-level effects to
parents by summation; macro mode recomputes effects at the parent level from
segment weights and weighted-average segment returns.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from .records import (
    AttributionRow,
    AttributionTable,
    HoldingRecord,
    Level,
    Mode,
    ReportSlice,
    Side,
    ValidationError,
)


def allocation_effect(w: float, bench_w: float, group_b: float, total_b: float) -> float:
    """Allocation effect (w - W) * (b_i - b) for one group."""
    return (w - bench_w) * (group_b - total_b)


def selection_effect(w: float, group_r: float, group_b: float) -> float:
    """Selection effect w * (r_i - b_i) for one group, interaction included."""
    return w * (group_r - group_b)


def _benchmark_total(records: Iterable[HoldingRecord]) -> float:
    return math.fsum(r.benchmark_weight * r.benchmark_return for r in records)


def _portfolio_total(records: Iterable[HoldingRecord]) -> float:
    return math.fsum(r.portfolio_weight * r.portfolio_return for r in records)


def benchmark_total_return(report_slice: ReportSlice) -> float:
    """Weighted benchmark return, the hurdle rate for allocation."""
    report_slice.validate()
    return _benchmark_total(report_slice.records)


def portfolio_total_return(report_slice: ReportSlice) -> float:
    """Weighted portfolio return over the slice."""
    report_slice.validate()
    return _portfolio_total(report_slice.records)


def segment_return(records: Sequence[HoldingRecord], side: Side) -> float:
    """Weighted-average return of a record subset on one side.

    Raises:
        ValidationError: empty subset or zero total weight, where the
            weighted mean is undefined.
    """
    if not records:
        raise ValidationError("segment return of an empty record set")
    if side is Side.PORTFOLIO:
        weight = math.fsum(r.portfolio_weight for r in records)
        weighted = _portfolio_total(records)
    else:
        weight = math.fsum(r.benchmark_weight for r in records)
        weighted = _benchmark_total(records)
    if weight <= 0:
        raise ValidationError(f"zero {side.value.lower()} weight in segment")
    return weighted / weight


def _sector_rows(report_slice: ReportSlice, total_b: float) -> list[AttributionRow]:
    return [
        AttributionRow(
            level=Level.SECTOR,
            group=rec.group,
            allocation=allocation_effect(
                rec.portfolio_weight, rec.benchmark_weight, rec.benchmark_return, total_b
            ),
            selection=selection_effect(
                rec.portfolio_weight, rec.portfolio_return, rec.benchmark_return
            ),
            fund=report_slice.fund,
            period=report_slice.period,
        )
        for rec in report_slice.records
    ]


def _total_row(rows: Sequence[AttributionRow], fund: str, period: str) -> AttributionRow:
    return AttributionRow(
        level=Level.TOTAL,
        group="Total",
        allocation=math.fsum(r.allocation for r in rows),
        selection=math.fsum(r.selection for r in rows),
        fund=fund,
        period=period,
    )


def compute_single_level(report_slice: ReportSlice) -> AttributionTable:
    """One attribution row per record plus a Total row, input order preserved."""
    report_slice.validate()
    total_b = _benchmark_total(report_slice.records)
    total_r = _portfolio_total(report_slice.records)
    rows = _sector_rows(report_slice, total_b)
    rows.append(_total_row(rows, report_slice.fund, report_slice.period))
    return AttributionTable(tuple(rows), Mode.SINGLE_LEVEL, total_b, total_r)


def _members_by_parent(report_slice: ReportSlice) -> dict[str, list[int]]:
    members: dict[str, list[int]] = {}
    for i, rec in enumerate(report_slice.records):
        members.setdefault(rec.parent_group, []).append(i)  # type: ignore[arg-type]
    return members


def compute_micro(report_slice: ReportSlice) -> AttributionTable:
    """Lowest-level effects with parent rows aggregated by exact summation."""
    report_slice.validate()
    report_slice.require_parents()
    total_b = _benchmark_total(report_slice.records)
    total_r = _portfolio_total(report_slice.records)
    sector = _sector_rows(report_slice, total_b)
    members = _members_by_parent(report_slice)
    parents = [
        AttributionRow(
            level=Level.PARENT,
            group=parent,
            allocation=math.fsum(sector[i].allocation for i in members[parent]),
            selection=math.fsum(sector[i].selection for i in members[parent]),
            fund=report_slice.fund,
            period=report_slice.period,
        )
        for parent in report_slice.parent_order()
    ]
    rows = sector + parents
    rows.append(_total_row(parents, report_slice.fund, report_slice.period))
    return AttributionTable(tuple(rows), Mode.MICRO, total_b, total_r)


def compute_macro(report_slice: ReportSlice) -> AttributionTable:
    """Parent-level effects from segment weights and segment mean returns."""
    report_slice.validate()
    report_slice.require_parents()
    total_b = _benchmark_total(report_slice.records)
    total_r = _portfolio_total(report_slice.records)
    members = _members_by_parent(report_slice)
    parents: list[AttributionRow] = []
    for parent in report_slice.parent_order():
        recs = [report_slice.records[i] for i in members[parent]]
        port_w = math.fsum(r.portfolio_weight for r in recs)
        bench_w = math.fsum(r.benchmark_weight for r in recs)
        for side, weight in ((Side.PORTFOLIO, port_w), (Side.BENCHMARK, bench_w)):
            if weight <= 0:
                raise ValidationError(
                    f"parent {parent!r} has zero {side.value.lower()} weight; "
                    "its segment return is undefined"
                )
        port_r = segment_return(recs, Side.PORTFOLIO)
        bench_r = segment_return(recs, Side.BENCHMARK)
        parents.append(
            AttributionRow(
                level=Level.PARENT,
                group=parent,
                allocation=allocation_effect(port_w, bench_w, bench_r, total_b),
                selection=selection_effect(port_w, port_r, bench_r),
                fund=report_slice.fund,
                period=report_slice.period,
            )
        )
    rows = parents + [_total_row(parents, report_slice.fund, report_slice.period)]
    return AttributionTable(tuple(rows), Mode.MACRO, total_b, total_r)
