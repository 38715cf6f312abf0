"""Command-line entry points for the attribution engine and the benchmark.

Subcommands: compute (attribution over a report file), gen-data (synthetic
corpus), gen-qa (question bank), oracle-respond (deterministic agent
stand-in), and grade (score predictions). Scores never affect the exit code;
structural failures (bad schema, bad flags, bad data) exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import evaluation, oracle, qa, report_io, synth
from .attribution import compute_macro, compute_micro, compute_single_level
from .factors import ground_truth_factors
from .records import AttributionTable, Mode, ReportSlice, ValidationError
from .report_io import SchemaError

log = logging.getLogger("perfattrib")

_MODES = {
    "single": Mode.SINGLE_LEVEL,
    "micro": Mode.MICRO,
    "macro": Mode.MACRO,
}


def _sniff_slices(path: Path) -> list[ReportSlice]:
    """Parse a report file as either schema, keyed off its header row."""
    with open(path, encoding="utf-8", newline="") as handle:
        try:
            header = next(csv.reader(handle))
        except StopIteration:
            raise SchemaError(f"{path}: empty file: no header row") from None
    if header == list(report_io.OBJECTIVE_TWO_COLUMNS):
        return report_io.parse_objective_two(path)
    if header == list(report_io.OBJECTIVE_ONE_COLUMNS):
        return [report.holdings for report in report_io.parse_objective_one(path)]
    raise SchemaError(f"{path}: header matches neither report schema")


def _corpus_path(corpus: str) -> Path:
    path = Path(corpus)
    if path.is_dir():
        path = path / "objective2.csv"
    if not path.exists():
        raise SchemaError(f"corpus file {path} does not exist")
    return path


def _presentation_sort(table: AttributionTable) -> AttributionTable:
    """Reorder group rows by total contribution, best first (display only)."""
    sector = sorted(table.sector_rows(), key=lambda r: r.total, reverse=True)
    parent = sorted(table.parent_rows(), key=lambda r: r.total, reverse=True)
    rows = tuple(sector) + tuple(parent) + (table.total_row(),)
    return AttributionTable(
        rows, table.mode, table.benchmark_total_return, table.portfolio_total_return
    )


def cmd_compute(args: argparse.Namespace) -> int:
    slices = _sniff_slices(Path(args.input))
    mode = _MODES[args.mode]
    if mode is Mode.SINGLE_LEVEL:
        tables = [compute_single_level(s) for s in slices]
    elif mode is Mode.MICRO:
        tables = [compute_micro(s) for s in slices]
    else:
        tables = [compute_macro(s) for s in slices]
    if args.sort_by_total:
        tables = [_presentation_sort(t) for t in tables]
    if mode is Mode.MACRO:
        data = report_io.emit_macro_result(tables)
    else:
        data = report_io.emit_result_tables(tables)
    report_io.write_bytes_atomic(args.out, data)
    log.info("computed %s attribution for %d slice(s) -> %s", args.mode, len(slices), args.out)
    return 0


def cmd_gen_data(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    corpus = synth.generate_corpus(args.seed)
    reports = []
    for holdings in corpus:
        table = compute_single_level(holdings)
        effects = tuple(
            report_io.EffectTriple(row.allocation, row.selection, row.total)
            for row in table.sector_rows()
        )
        reports.append(report_io.ObjectiveOneReport(holdings, effects))
    report_io.write_bytes_atomic(out_dir / "objective1.csv", report_io.emit_objective_one(reports))
    report_io.write_bytes_atomic(out_dir / "objective2.csv", report_io.emit_objective_two(corpus))
    log.info("wrote %d slices to %s", len(corpus), out_dir)
    return 0


def cmd_gen_qa(args: argparse.Namespace) -> int:
    slices = report_io.parse_objective_two(_corpus_path(args.corpus))
    items = qa.generate_questions(
        slices, n=args.n, seed=args.seed, allow_duplicates=args.allow_duplicates
    )
    report_io.write_bytes_atomic(args.out, qa.emit_question_bank(items))
    report_io.write_bytes_atomic(args.keys, qa.emit_answer_key(items))
    log.info("wrote %d questions to %s (keys: %s)", len(items), args.out, args.keys)
    return 0


def cmd_oracle_respond(args: argparse.Namespace) -> int:
    slices = _sniff_slices(Path(args.input))
    out_dir = Path(args.out_dir)
    if args.task == "factors":
        written = oracle.write_factor_responses(slices, out_dir)
    elif args.task in ("micro", "macro"):
        written = oracle.write_table_results(slices, args.task, out_dir)
    else:
        if not args.bank:
            raise SchemaError("task 'qa' requires --bank with the public question file")
        items = qa.parse_question_bank(args.bank)
        answers = oracle.answer_questions(items, slices)
        path = out_dir / "submission.csv"
        report_io.write_bytes_atomic(path, qa.emit_submission(answers))
        written = [path]
    log.info("oracle wrote %d file(s) to %s", len(written), out_dir)
    return 0


def _grade_factors(args: argparse.Namespace) -> int:
    slices = _sniff_slices(Path(args.truth))
    pred_dir = Path(args.pred)
    if not pred_dir.is_dir():
        raise SchemaError(f"--pred must be a directory of response files, got {pred_dir}")
    value_tol = args.tol if args.tol is not None else evaluation.KEYWORD_VALUE_TOL
    rows = [["Fund", "Period", "Earned", "Possible", "Accuracy"]]
    total_earned = total_possible = 0
    for holdings in slices:
        predicted = []
        for record in holdings.records:
            path = pred_dir / report_io.response_filename(
                holdings.fund, holdings.period, record.group
            )
            if not path.exists():
                continue
            response = report_io.split_agent_response(path.read_text(encoding="utf-8"))
            predicted.extend(response.factor_rows)
        card = evaluation.keyword_accuracy(
            predicted, ground_truth_factors(holdings), value_tol=value_tol
        )
        rows.append(
            [holdings.fund, holdings.period, str(card.earned), str(card.possible),
             f"{card.accuracy:.0%}"]
        )
        total_earned += card.earned
        total_possible += card.possible
    accuracy = total_earned / total_possible if total_possible else 0.0
    rows.append(["Total", "", str(total_earned), str(total_possible), f"{accuracy:.0%}"])
    _write_score_rows(args.out, rows)
    print(f"keyword accuracy: {total_earned}/{total_possible} ({accuracy:.0%})")
    return 0


def _grade_tables(args: argparse.Namespace) -> int:
    slices = report_io.parse_objective_two(_corpus_path(args.truth))
    by_key = {(s.fund, s.period): s for s in slices}
    pred = Path(args.pred)
    files = sorted(pred.glob("*.csv")) if pred.is_dir() else [pred]
    if not files:
        raise SchemaError(f"no prediction files found under {pred}")
    tol = args.tol if args.tol is not None else evaluation.TABLE_VALUE_TOL
    micro_entries: list[tuple] = []
    macro_entries: list[tuple] = []
    for path in files:
        with open(path, encoding="utf-8", newline="") as handle:
            try:
                header = next(csv.reader(handle))
            except StopIteration:
                raise SchemaError(f"{path}: empty file: no header row") from None
        if header == list(report_io.MACRO_RESULT_COLUMNS):
            grouped: dict[tuple[str, str], list] = {}
            for value in report_io.parse_macro_result(path):
                grouped.setdefault((value.fund, value.period), []).append(
                    (value.group, value.effect, value.value)
                )
            for key, group_cells in grouped.items():
                truth = by_key.get(key)
                if truth is None:
                    raise SchemaError(f"{path}: no truth slice for {key[0]!r}/{key[1]!r}")
                table = compute_macro(truth)
                macro_entries.append((table, evaluation.numeric_table_accuracy(group_cells, table, tol)))
        else:
            parsed = report_io.parse_result_file(path)
            grouped_rows: dict[tuple[str, str], list] = {}
            for row in parsed:
                grouped_rows.setdefault((row.fund, row.period), []).append(row)
            for key, group_rows in grouped_rows.items():
                truth = by_key.get(key)
                if truth is None:
                    raise SchemaError(f"{path}: no truth slice for {key[0]!r}/{key[1]!r}")
                table = compute_micro(truth)
                cells = evaluation.cells_from_result_rows(group_rows)
                micro_entries.append((table, evaluation.numeric_table_accuracy(cells, table, tol)))
    parts = []
    if micro_entries:
        data = evaluation.emit_micro_scoreboard(micro_entries)
        _write_scoreboard(args.out, data, suffix="micro")
        parts.append(_summarize("micro", micro_entries))
    if macro_entries:
        data = evaluation.emit_macro_scoreboard(macro_entries)
        _write_scoreboard(args.out, data, suffix="macro")
        parts.append(_summarize("macro", macro_entries))
    print("; ".join(parts))
    return 0


def _summarize(label: str, entries: Sequence[tuple]) -> str:
    earned = sum(card.earned for _, card in entries)
    possible = sum(card.possible for _, card in entries)
    accuracy = earned / possible if possible else 0.0
    return f"{label} accuracy: {earned}/{possible} ({accuracy:.0%})"


def _grade_qa(args: argparse.Namespace) -> int:
    key_items = qa.parse_answer_key(args.truth)
    submission = qa.parse_submission(args.pred)
    tol = args.tol if args.tol is not None else qa.QCALC_TOL
    report = qa.grade(submission, key_items, tol=tol)
    if args.out:
        report_io.write_bytes_atomic(args.out, qa.emit_qa_scoreboard(report))
    for kind, card in report.by_kind.items():
        print(f"{kind.value}: {card.earned}/{card.possible} ({card.accuracy:.0%})")
    card = report.overall
    print(f"total: {card.earned}/{card.possible} ({card.accuracy:.0%})")
    return 0


def cmd_grade(args: argparse.Namespace) -> int:
    if args.kind == "factors":
        return _grade_factors(args)
    if args.kind == "tables":
        return _grade_tables(args)
    return _grade_qa(args)


def _write_score_rows(out: str | None, rows: list[list[str]]) -> None:
    if not out:
        return
    import io

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    report_io.write_bytes_atomic(out, buffer.getvalue().encode("utf-8"))


def _write_scoreboard(out: str | None, data: bytes, suffix: str) -> None:
    if not out:
        return
    path = Path(out)
    if path.suffix:
        path = path.with_name(f"{path.stem}_{suffix}{path.suffix}")
    else:
        path = path / f"scoreboard_{suffix}.csv"
    report_io.write_bytes_atomic(path, data)


def _load_config(path: str | None) -> dict[str, str]:
    """Key=value config file; '#' starts a comment, blank lines ignored."""
    if not path:
        return {}
    values: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip().strip("\"'")
    return values


def _apply_config(args: argparse.Namespace) -> None:
    config = _load_config(getattr(args, "config", None))
    for key, caster, default in (
        ("seed", int, 7),
        ("n", int, 140),
        ("tol", float, None),
    ):
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            raw = config.get(key)
            setattr(args, key, caster(raw) if raw is not None else default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perfattrib",
        description="Brinson-Fachler attribution engine and analyst benchmark harness",
    )
    parser.add_argument("--config", help="key=value config file; flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute attribution effects for a report file")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=sorted(_MODES), required=True)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--sort-by-total", action="store_true",
        help="order group rows by total contribution instead of input order",
    )
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("gen-data", help="generate the synthetic report corpus")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("gen-qa", help="generate the question bank and answer key")
    p.add_argument("--corpus", required=True, help="corpus directory or report file")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--allow-duplicates", action="store_true")
    p.set_defaults(func=cmd_gen_qa)

    p = sub.add_parser("oracle-respond", help="write deterministic agent-shaped responses")
    p.add_argument("--input", required=True)
    p.add_argument("--task", choices=("factors", "micro", "macro", "qa"), required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--bank", help="public question bank (qa task only)")
    p.set_defaults(func=cmd_oracle_respond)

    p = sub.add_parser("grade", help="score predictions against ground truth")
    p.add_argument("--kind", choices=("factors", "tables", "qa"), required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", help="where to write the score CSV")
    p.set_defaults(func=cmd_grade)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    levels = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    verbosity = os.environ.get("PERFATTRIB_VERBOSITY", "info").lower()
    logging.basicConfig(level=levels.get(verbosity, logging.INFO), format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except (SchemaError, ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
