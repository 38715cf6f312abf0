"""Deterministic respondent that stands in for the LLM agent.

It produces exactly the artifacts an agent run would leave behind (factor
response texts, result CSVs, a question submission), computed through the
attribution engine, so the full pipeline can be exercised and graded offline.
Grading oracle output must score 100% by construction.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .attribution import (
    benchmark_total_return,
    compute_macro,
    compute_micro,
    compute_single_level,
)
from .factors import ground_truth_factors, render_sentences
from .qa import QaItem, QuestionKind, effect_value, format_value5
from .records import Level, ReportSlice
from .report_io import (
    RESPONSE_MARKER,
    emit_factor_rows,
    emit_macro_result,
    emit_result_tables,
    response_filename,
    slugify,
    write_bytes_atomic,
)


def factor_response(holdings: ReportSlice, sector: str) -> str:
    """Agent-shaped reply for one sector: two bullets, marker, factor CSV."""
    assessments = ground_truth_factors(holdings)
    pair = [a for a in assessments if a.sector == sector]
    if len(pair) != 2:
        raise ValueError(f"sector {sector!r} not found in {holdings.fund!r}/{holdings.period!r}")
    record = next(r for r in holdings.records if r.group == sector)
    total_b = benchmark_total_return(holdings)
    bullets = render_sentences(
        (pair[0], pair[1]),
        group_b=record.benchmark_return,
        total_b=total_b,
        group_r=record.portfolio_return,
    )
    return "\n".join(bullets) + f"\n{RESPONSE_MARKER}\n" + emit_factor_rows(pair)


def write_factor_responses(slices: Sequence[ReportSlice], out_dir: str | Path) -> list[Path]:
    """One response file per (fund, period, sector)."""
    out_dir = Path(out_dir)
    written: list[Path] = []
    for holdings in slices:
        for record in holdings.records:
            path = out_dir / response_filename(holdings.fund, holdings.period, record.group)
            write_bytes_atomic(path, factor_response(holdings, record.group).encode("utf-8"))
            written.append(path)
    return written


def write_table_results(
    slices: Sequence[ReportSlice], task: str, out_dir: str | Path
) -> list[Path]:
    """One result file per (fund, period) for the micro or macro task."""
    if task not in ("micro", "macro"):
        raise ValueError(f"unknown table task {task!r}")
    out_dir = Path(out_dir)
    written: list[Path] = []
    for holdings in slices:
        if task == "micro":
            data = emit_result_tables([compute_micro(holdings)])
        else:
            data = emit_macro_result([compute_macro(holdings)])
        name = f"{slugify(holdings.fund)}__{slugify(holdings.period)}__{task}.csv"
        path = out_dir / name
        write_bytes_atomic(path, data)
        written.append(path)
    return written


def answer_questions(
    items: Sequence[QaItem], corpus: Sequence[ReportSlice]
) -> dict[str, str]:
    """Answer a public question bank from the corpus it was generated from.

    Values are recomputed through the engine; multiple choice picks the
    closest option, so keys are never consulted.
    """
    tables = {(s.fund, s.period): compute_single_level(s) for s in corpus}
    answers: dict[str, str] = {}
    for item in items:
        table = tables.get((item.fund, item.period))
        if table is None:
            raise ValueError(f"question {item.id}: no corpus slice for {item.fund!r}/{item.period!r}")
        row = next((r for r in table.rows if r.level is Level.SECTOR and r.group == item.sector), None)
        if row is None:
            raise ValueError(f"question {item.id}: sector {item.sector!r} not in slice")
        value = effect_value(row, item.effect)
        if item.kind is QuestionKind.QAMC:
            if not item.options:
                raise ValueError(f"question {item.id}: multiple choice without options")
            distances = [abs(float(option) - value) for option in item.options]
            answers[item.id] = "ABCD"[distances.index(min(distances))]
        else:
            answers[item.id] = format_value5(value)
    return answers

