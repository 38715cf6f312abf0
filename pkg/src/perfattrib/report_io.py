"""Reading and writing of every CSV artifact in the pipeline.

Schemas are strict: column names, order, and case must match exactly, and
derived columns are cross-checked on ingest. Emission is canonical (UTF-8,
comma delimiter, LF endings, 4-dp numbers in report files and 6-dp in result
files) so emitted artifacts are byte-stable and round-trip through their
parsers. Agent-response splitting, by contrast, is total: it never fails on
arbitrary text, it just degrades.
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

from .factors import (
    FactorAssessment,
    PerformanceStance,
    WeightStance,
    sign_from_stances,
)
from .records import EffectType, HoldingRecord, Level, ReportSlice

OBJECTIVE_ONE_COLUMNS = (
    "GICS Sector",
    "Portfolio Weight",
    "Benchmark Weight",
    "Portfolio Return",
    "Benchmark Return",
    "Variation in Weight",
    "Variation in Return",
    "Allocation Effect",
    "Selection Effect",
    "Total Contribution",
    "Period",
    "Fund",
    "Benchmark",
)
OBJECTIVE_TWO_COLUMNS = (
    "GICS Type",
    "GICS Sector",
    "Portfolio Weight",
    "Benchmark Weight",
    "Portfolio Return",
    "Benchmark Return",
    "Period",
    "Fund",
    "Benchmark",
)
FACTOR_COLUMNS = ("Sector", "Effect Type", "Value", "Sector Weight", "Sector Performance")
SECTOR_RESULT_COLUMNS = (
    "GICS Sector",
    "Allocation Effect",
    "Selection Effect",
    "Total Contribution",
    "Fund",
    "Period",
)
PARENT_RESULT_COLUMNS = ("GICS Type",) + SECTOR_RESULT_COLUMNS[1:]
MACRO_RESULT_COLUMNS = ("GICS Type", "Effect Type", "Value", "Fund", "Period")

RESPONSE_MARKER = "CSV Format:"

# Derived columns in report files must agree with their source columns.
DERIVED_COLUMN_TOL = 1e-9


class SchemaError(ValueError):
    """A report or result file does not match its schema."""


@dataclass(frozen=True)
class EffectTriple:
    """Effect cells of one report row, kept verbatim from the file."""

    allocation: float
    selection: float
    total: float


@dataclass(frozen=True)
class ObjectiveOneReport:
    """A parsed single-level report: holdings plus the published effects."""

    holdings: ReportSlice
    effects: tuple[EffectTriple, ...]


@dataclass(frozen=True)
class AgentResponse:
    """An agent reply split into bullets and typed factor rows.

    ``parseable`` is False when the response marker is missing entirely; such
    responses are graded as all-wrong rather than raising.
    """

    raw_text: str
    bullets: tuple[str, ...]
    factor_rows: tuple[FactorAssessment, ...]
    parseable: bool


@dataclass(frozen=True)
class ResultRow:
    """One line of a sector/parent result file."""

    level: Level
    group: str
    allocation: float
    selection: float
    total: float
    fund: str
    period: str


@dataclass(frozen=True)
class MacroValue:
    """One (group, effect) value line of a macro result file."""

    group: str
    effect: EffectType
    value: float
    fund: str
    period: str


def _fmt(value: float, places: int) -> str:
    return f"{value if value != 0 else 0.0:.{places}f}"


def _read_rows(source: str | Path | IO[str]) -> list[list[str]]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as handle:
            return list(csv.reader(handle))
    return list(csv.reader(source))


def _check_header(actual: Sequence[str], expected: Sequence[str]) -> None:
    for i, want in enumerate(expected):
        got = actual[i] if i < len(actual) else None
        if got != want:
            raise SchemaError(f"header column {i + 1}: expected {want!r}, found {got!r}")
    if len(actual) > len(expected):
        raise SchemaError(
            f"header has {len(actual)} columns, expected {len(expected)} "
            f"(unexpected {actual[len(expected)]!r})"
        )


def _cell_float(row_no: int, column: str, cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise SchemaError(f"row {row_no}, column {column!r}: {cell!r} is not numeric") from None


def _check_width(row_no: int, row: Sequence[str], expected: int) -> None:
    if len(row) != expected:
        raise SchemaError(f"row {row_no}: expected {expected} cells, found {len(row)}")


def _check_derived(row_no: int, column: str, stated: float, derived: float) -> None:
    if abs(stated - derived) > DERIVED_COLUMN_TOL:
        raise SchemaError(
            f"row {row_no}: {column!r} is {stated}, but the source columns give {derived}"
        )


def parse_objective_one(source: str | Path | IO[str]) -> list[ObjectiveOneReport]:
    """Parse a single-level report file, grouped by (fund, period).

    The published Allocation/Selection/Total cells are retained verbatim so
    they can serve as grading truth.
    """
    rows = _read_rows(source)
    if not rows:
        raise SchemaError("empty file: no header row")
    _check_header(rows[0], OBJECTIVE_ONE_COLUMNS)
    if len(rows) == 1:
        warnings.warn("report file has a header but no data rows", stacklevel=2)
    grouped: dict[tuple[str, str], tuple[list[HoldingRecord], list[EffectTriple]]] = {}
    for row_no, row in enumerate(rows[1:], start=2):
        _check_width(row_no, row, len(OBJECTIVE_ONE_COLUMNS))
        numbers = [
            _cell_float(row_no, OBJECTIVE_ONE_COLUMNS[i], row[i]) for i in range(1, 10)
        ]
        pw, bw, pr, br, var_w, var_r, alloc, sel, total = numbers
        _check_derived(row_no, "Variation in Weight", var_w, pw - bw)
        _check_derived(row_no, "Variation in Return", var_r, pr - br)
        period, fund, benchmark = row[10], row[11], row[12]
        record = HoldingRecord(
            group=row[0],
            portfolio_weight=pw,
            benchmark_weight=bw,
            portfolio_return=pr,
            benchmark_return=br,
            period=period,
            fund=fund,
            benchmark=benchmark,
        )
        records, effects = grouped.setdefault((fund, period), ([], []))
        records.append(record)
        effects.append(EffectTriple(alloc, sel, total))
    out: list[ObjectiveOneReport] = []
    for (fund, period), (records, effects) in grouped.items():
        holdings = ReportSlice(fund, period, tuple(records))
        holdings.validate()
        out.append(ObjectiveOneReport(holdings, tuple(effects)))
    return out


def parse_objective_two(source: str | Path | IO[str]) -> list[ReportSlice]:
    """Parse a weights-and-returns report with parent groups."""
    rows = _read_rows(source)
    if not rows:
        raise SchemaError("empty file: no header row")
    _check_header(rows[0], OBJECTIVE_TWO_COLUMNS)
    if len(rows) == 1:
        warnings.warn("report file has a header but no data rows", stacklevel=2)
    grouped: dict[tuple[str, str], list[HoldingRecord]] = {}
    for row_no, row in enumerate(rows[1:], start=2):
        _check_width(row_no, row, len(OBJECTIVE_TWO_COLUMNS))
        numbers = [
            _cell_float(row_no, OBJECTIVE_TWO_COLUMNS[i], row[i]) for i in range(2, 6)
        ]
        period, fund, benchmark = row[6], row[7], row[8]
        record = HoldingRecord(
            group=row[1],
            parent_group=row[0],
            portfolio_weight=numbers[0],
            benchmark_weight=numbers[1],
            portfolio_return=numbers[2],
            benchmark_return=numbers[3],
            period=period,
            fund=fund,
            benchmark=benchmark,
        )
        grouped.setdefault((fund, period), []).append(record)
    out: list[ReportSlice] = []
    for (fund, period), records in grouped.items():
        holdings = ReportSlice(fund, period, tuple(records))
        holdings.validate()
        out.append(holdings)
    return out


def emit_objective_one(reports: Iterable[ObjectiveOneReport]) -> bytes:
    """Serialize single-level reports, deriving the variation columns."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(OBJECTIVE_ONE_COLUMNS)
    for report in reports:
        for rec, eff in zip(report.holdings.records, report.effects):
            writer.writerow(
                [
                    rec.group,
                    _fmt(rec.portfolio_weight, 4),
                    _fmt(rec.benchmark_weight, 4),
                    _fmt(rec.portfolio_return, 4),
                    _fmt(rec.benchmark_return, 4),
                    _fmt(rec.portfolio_weight - rec.benchmark_weight, 4),
                    _fmt(rec.portfolio_return - rec.benchmark_return, 4),
                    _fmt(eff.allocation, 4),
                    _fmt(eff.selection, 4),
                    _fmt(eff.total, 4),
                    rec.period,
                    rec.fund,
                    rec.benchmark,
                ]
            )
    return buffer.getvalue().encode("utf-8")


def emit_objective_two(slices: Iterable[ReportSlice]) -> bytes:
    """Serialize weights-and-returns reports with their parent groups."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(OBJECTIVE_TWO_COLUMNS)
    for holdings in slices:
        holdings.require_parents()
        for rec in holdings.records:
            writer.writerow(
                [
                    rec.parent_group,
                    rec.group,
                    _fmt(rec.portfolio_weight, 4),
                    _fmt(rec.benchmark_weight, 4),
                    _fmt(rec.portfolio_return, 4),
                    _fmt(rec.benchmark_return, 4),
                    rec.period,
                    rec.fund,
                    rec.benchmark,
                ]
            )
    return buffer.getvalue().encode("utf-8")


_EFFECT_WORDS = {"allocation": EffectType.ALLOCATION, "selection": EffectType.SELECTION}
_WEIGHT_WORDS = {stance.value.lower(): stance for stance in WeightStance}
_PERFORMANCE_WORDS = {stance.value.lower(): stance for stance in PerformanceStance}


def _typed_factor_row(fields: Sequence[str]) -> FactorAssessment | None:
    if len(fields) != len(FACTOR_COLUMNS):
        return None
    effect = _EFFECT_WORDS.get(fields[1].lower())
    if effect is None:
        return None
    try:
        value = float(fields[2])
    except ValueError:
        return None
    weight_cell = fields[3].lower()
    if weight_cell == "none":
        weight_stance = None
    elif weight_cell in _WEIGHT_WORDS:
        weight_stance = _WEIGHT_WORDS[weight_cell]
    else:
        return None
    performance_stance = _PERFORMANCE_WORDS.get(fields[4].lower())
    if performance_stance is None:
        return None
    return FactorAssessment(
        sector=fields[0],
        effect_type=effect,
        value=value,
        weight_stance=weight_stance,
        performance_stance=performance_stance,
        sign=sign_from_stances(effect, weight_stance, performance_stance),
    )


def split_agent_response(raw: str) -> AgentResponse:
    """Split an agent reply into bullets and factor rows, never raising.

    Bullets are the "-" lines ahead of the first exact ``CSV Format:``
    marker; factor rows are the well-formed CSV lines after it. A missing
    marker classifies the whole response as unparseable; malformed rows are
    silently dropped (they then score zero).
    """
    marker_at = raw.find(RESPONSE_MARKER)
    if marker_at < 0:
        return AgentResponse(raw_text=raw, bullets=(), factor_rows=(), parseable=False)
    head = raw[:marker_at]
    tail = raw[marker_at + len(RESPONSE_MARKER) :]
    bullets = tuple(
        line.strip() for line in head.splitlines() if line.strip().startswith("-")
    )
    rows: list[FactorAssessment] = []
    for line in tail.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            fields = [cell.strip() for cell in next(csv.reader([line]))]
        except (csv.Error, StopIteration):
            continue
        if [f.lower() for f in fields] == [c.lower() for c in FACTOR_COLUMNS]:
            continue
        typed = _typed_factor_row(fields)
        if typed is not None:
            rows.append(typed)
    return AgentResponse(raw_text=raw, bullets=bullets, factor_rows=tuple(rows), parseable=True)


def emit_factor_rows(rows: Iterable[FactorAssessment]) -> str:
    """Factor CSV block (header plus one line per assessment, 4-dp values)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(FACTOR_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.sector,
                row.effect_type.value,
                _fmt(row.value, 4),
                "None" if row.weight_stance is None else row.weight_stance.value,
                row.performance_stance.value,
            ]
        )
    return buffer.getvalue()


def emit_result_tables(tables: Iterable) -> bytes:
    """Serialize attribution tables as a result file (6-dp values).

    Sector rows come first under their own header; parent rows, when
    present, follow under a second header. Total rows are not published.
    """
    sector_rows: list[ResultRow] = []
    parent_rows: list[ResultRow] = []
    for table in tables:
        for row in table.rows:
            if row.level is Level.TOTAL:
                continue
            target = sector_rows if row.level is Level.SECTOR else parent_rows
            target.append(
                ResultRow(
                    row.level, row.group, row.allocation, row.selection, row.total,
                    row.fund, row.period,
                )
            )
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if sector_rows or not parent_rows:
        writer.writerow(SECTOR_RESULT_COLUMNS)
        for row in sector_rows:
            _write_result_row(writer, row)
    if parent_rows:
        writer.writerow(PARENT_RESULT_COLUMNS)
        for row in parent_rows:
            _write_result_row(writer, row)
    return buffer.getvalue().encode("utf-8")


def _write_result_row(writer, row: ResultRow) -> None:
    writer.writerow(
        [
            row.group,
            _fmt(row.allocation, 6),
            _fmt(row.selection, 6),
            _fmt(row.total, 6),
            row.fund,
            row.period,
        ]
    )


def parse_result_file(source: str | Path | IO[str]) -> list[ResultRow]:
    """Parse a sector/parent result file (either or both header blocks)."""
    rows = _read_rows(source)
    if not rows:
        raise SchemaError("empty file: no header row")
    if rows[0] == list(SECTOR_RESULT_COLUMNS):
        level = Level.SECTOR
    elif rows[0] == list(PARENT_RESULT_COLUMNS):
        level = Level.PARENT
    else:
        _check_header(rows[0], SECTOR_RESULT_COLUMNS)
    out: list[ResultRow] = []
    for row_no, row in enumerate(rows[1:], start=2):
        if row == list(PARENT_RESULT_COLUMNS):
            level = Level.PARENT
            continue
        if row == list(SECTOR_RESULT_COLUMNS):
            level = Level.SECTOR
            continue
        _check_width(row_no, row, len(SECTOR_RESULT_COLUMNS))
        out.append(
            ResultRow(
                level=level,
                group=row[0],
                allocation=_cell_float(row_no, "Allocation Effect", row[1]),
                selection=_cell_float(row_no, "Selection Effect", row[2]),
                total=_cell_float(row_no, "Total Contribution", row[3]),
                fund=row[4],
                period=row[5],
            )
        )
    return out


_MACRO_EFFECT_WORDS = {
    "Allocation Effect": EffectType.ALLOCATION,
    "Selection Effect": EffectType.SELECTION,
}


def emit_macro_result(tables: Iterable) -> bytes:
    """Serialize macro tables as (group, effect, value) lines, 6-dp values."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(MACRO_RESULT_COLUMNS)
    for table in tables:
        for row in table.rows:
            if row.level is not Level.PARENT:
                continue
            writer.writerow(
                [row.group, "Allocation Effect", _fmt(row.allocation, 6), row.fund, row.period]
            )
            writer.writerow(
                [row.group, "Selection Effect", _fmt(row.selection, 6), row.fund, row.period]
            )
    return buffer.getvalue().encode("utf-8")


def parse_macro_result(source: str | Path | IO[str]) -> list[MacroValue]:
    """Parse a macro result file into typed (group, effect, value) records."""
    rows = _read_rows(source)
    if not rows:
        raise SchemaError("empty file: no header row")
    _check_header(rows[0], MACRO_RESULT_COLUMNS)
    out: list[MacroValue] = []
    for row_no, row in enumerate(rows[1:], start=2):
        _check_width(row_no, row, len(MACRO_RESULT_COLUMNS))
        effect = _MACRO_EFFECT_WORDS.get(row[1])
        if effect is None:
            raise SchemaError(f"row {row_no}: unknown effect type {row[1]!r}")
        out.append(
            MacroValue(
                group=row[0],
                effect=effect,
                value=_cell_float(row_no, "Value", row[2]),
                fund=row[3],
                period=row[4],
            )
        )
    return out


def emit_embedding_sidecar(vectors: Mapping[str, Sequence[float]]) -> bytes:
    """Serialize id -> vector records, one per line, full float precision."""
    dimension: int | None = None
    lines: list[str] = []
    for record_id, vector in vectors.items():
        if "," in record_id or "\n" in record_id:
            raise ValueError(f"record id {record_id!r} may not contain commas or newlines")
        if dimension is None:
            dimension = len(vector)
        if len(vector) != dimension or dimension == 0:
            raise ValueError(
                f"vector for {record_id!r} has length {len(vector)}, expected {dimension or '>0'}"
            )
        lines.append(record_id + "," + ",".join(repr(float(v)) for v in vector))
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def parse_embedding_sidecar(source: str | Path | IO[str]) -> dict[str, tuple[float, ...]]:
    """Parse an embedding sidecar, enforcing one fixed vector length."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as handle:
            text = handle.read()
    else:
        text = source.read()
    vectors: dict[str, tuple[float, ...]] = {}
    dimension: int | None = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        record_id, _, rest = line.partition(",")
        cells = rest.split(",") if rest else []
        if not cells:
            raise SchemaError(f"line {line_no}: record {record_id!r} has no vector")
        try:
            vector = tuple(float(c) for c in cells)
        except ValueError:
            raise SchemaError(f"line {line_no}: non-numeric vector component") from None
        if dimension is None:
            dimension = len(vector)
        elif len(vector) != dimension:
            raise SchemaError(
                f"line {line_no}: vector length {len(vector)} != {dimension}"
            )
        if math.isnan(sum(vector)):
            raise SchemaError(f"line {line_no}: vector contains NaN")
        vectors[record_id] = vector
    return vectors


def slugify(label: str) -> str:
    """Filesystem-safe form of a fund/period/sector label."""
    return label.replace("/", "-").replace(" ", "_")


def response_filename(fund: str, period: str, unit: str) -> str:
    """Canonical response file name for one (fund, period, unit) call."""
    return f"{slugify(fund)}__{slugify(period)}__{slugify(unit)}.txt"


def write_bytes_atomic(path: str | Path, data: bytes) -> None:
    """Write a file atomically (temp file in place, then rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
