"""Exam-style question bank over attribution reports, with grading.

Two question kinds: multiple choice ("is closest to:") with four options
A-D, and direct calculation, answered as a number rounded to five decimal
places. Question selection, distractor values, and option order are all
deterministic functions of (corpus, n, seed).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Mapping, Sequence

import numpy as np

from .attribution import compute_single_level
from .evaluation import ScoreCard, Unit
from .records import AttributionRow, EffectType, Level, ReportSlice
from .report_io import SchemaError

QCALC_TOL = 5e-6  # half a unit of the mandated 5-dp rounding

OPTION_LETTERS = ("A", "B", "C", "D")
UNKNOWN_LETTER = "E"

EFFECT_TITLES = {
    EffectType.ALLOCATION: "Allocation Effect",
    EffectType.SELECTION: "Selection Effect",
    EffectType.TOTAL: "Total Contribution",
}


class QuestionKind(Enum):
    QAMC = "QAMC"
    QCALC = "QCalc"


@dataclass(frozen=True)
class QaItem:
    """One generated question with its answer key.

    ``options`` is None for calculation questions; ``key`` is the correct
    option letter for multiple choice and the 5-dp value string otherwise.
    """

    id: str
    kind: QuestionKind
    question_text: str
    effect: EffectType
    sector: str
    fund: str
    period: str
    options: tuple[str, ...] | None
    key: str


@dataclass(frozen=True)
class QaReport:
    overall: ScoreCard
    by_kind: Mapping[QuestionKind, ScoreCard]


def format_value5(value: float) -> str:
    rounded = round(value, 5)
    return f"{rounded if rounded != 0 else 0.0:.5f}"


def effect_value(row: AttributionRow, effect: EffectType) -> float:
    if effect is EffectType.ALLOCATION:
        return row.allocation
    if effect is EffectType.SELECTION:
        return row.selection
    return row.total


def _question_text(kind: QuestionKind, effect: EffectType, sector: str, fund: str, period: str) -> str:
    title = EFFECT_TITLES[effect]
    if kind is QuestionKind.QAMC:
        return (
            f"The {title} from the {sector} sector, in fund {fund}, "
            f"in the period {period}, is closest to:"
        )
    return (
        f"Calculate the {title} from the {sector} sector, in fund {fund}, "
        f"in the period {period}:"
    )


def _distractors(
    key_value: float,
    row: AttributionRow,
    effect: EffectType,
    sector_rows: Sequence[AttributionRow],
    rng: np.random.Generator,
    tol: float,
) -> list[float]:
    """Three plausible wrong options, all separated from the key and each other."""
    chosen: list[float] = []

    def distinct(value: float) -> bool:
        return abs(value - key_value) > 2 * tol and all(
            abs(value - c) > 2 * tol for c in chosen
        )

    other_effect = EffectType.SELECTION if effect is not EffectType.SELECTION else EffectType.ALLOCATION
    candidates = [round(-key_value, 5), round(effect_value(row, other_effect), 5)]
    for value in candidates:
        if distinct(value):
            chosen.append(value)
    others = [r for r in sector_rows if r.group != row.group]
    for _ in range(16):
        if len(chosen) >= 3 or not others:
            break
        pick = others[int(rng.integers(len(others)))]
        value = round(effect_value(pick, effect), 5)
        if distinct(value):
            chosen.append(value)
    step = 25 * tol
    offset = 1
    while len(chosen) < 3:
        for value in (round(key_value + offset * step, 5), round(key_value - offset * step, 5)):
            if len(chosen) < 3 and distinct(value):
                chosen.append(value)
        offset += 1
    return chosen[:3]


def generate_questions(
    corpus: Sequence[ReportSlice],
    n: int,
    seed: int,
    allow_duplicates: bool = False,
    tol: float = QCALC_TOL,
) -> list[QaItem]:
    """Generate n questions (first half multiple choice, second half direct).

    Raises:
        ValueError: odd n, empty corpus, or a corpus too small to supply n
            distinct (sector, fund, period, effect) tuples without the
            ``allow_duplicates`` flag.
    """
    if n <= 0 or n % 2:
        raise ValueError(f"question count must be a positive even number, got {n}")
    if not corpus:
        raise ValueError("cannot generate questions from an empty corpus")
    tables = [compute_single_level(s) for s in corpus]
    pool: list[tuple[int, int, EffectType]] = [
        (t, r, effect)
        for t, table in enumerate(tables)
        for r, row in enumerate(table.rows)
        if row.level is Level.SECTOR
        for effect in (EffectType.ALLOCATION, EffectType.SELECTION, EffectType.TOTAL)
    ]
    rng = np.random.default_rng(seed)
    if allow_duplicates:
        picks = [pool[int(i)] for i in rng.integers(len(pool), size=n)]
    else:
        if n > len(pool):
            raise ValueError(
                f"corpus offers {len(pool)} distinct question tuples, need {n}; "
                "pass allow_duplicates to sample with replacement"
            )
        picks = [pool[int(i)] for i in rng.permutation(len(pool))[:n]]
    items: list[QaItem] = []
    for i, (t, r, effect) in enumerate(picks):
        table = tables[t]
        row = table.rows[r]
        kind = QuestionKind.QAMC if i < n // 2 else QuestionKind.QCALC
        value = round(effect_value(row, effect), 5)
        if kind is QuestionKind.QAMC:
            sector_rows = table.sector_rows()
            wrong = _distractors(value, row, effect, sector_rows, rng, tol)
            key_at = int(rng.integers(len(OPTION_LETTERS)))
            values = wrong[:key_at] + [value] + wrong[key_at:]
            options = tuple(format_value5(v) for v in values)
            key = OPTION_LETTERS[key_at]
        else:
            options = None
            key = format_value5(value)
        items.append(
            QaItem(
                id=f"q{i + 1:03d}",
                kind=kind,
                question_text=_question_text(kind, effect, row.group, row.fund, row.period),
                effect=effect,
                sector=row.group,
                fund=row.fund,
                period=row.period,
                options=options,
                key=key,
            )
        )
    return items


def grade(
    submission: Mapping[str, str],
    key: Sequence[QaItem],
    tol: float = QCALC_TOL,
) -> QaReport:
    """Grade a submission against the answer key.

    Multiple choice requires the exact key letter; calculations pass within
    ``tol`` of the key value. Unanswered or unparseable answers score zero;
    an answer for an unknown question id is a structural error.
    """
    known = {item.id for item in key}
    stray = set(submission) - known
    if stray:
        raise ValueError(f"submission answers unknown question ids: {sorted(stray)}")
    breakdown: dict[str, bool] = {}
    by_kind_ids: dict[QuestionKind, list[str]] = {k: [] for k in QuestionKind}
    for item in key:
        by_kind_ids[item.kind].append(item.id)
        answer = submission.get(item.id)
        if answer is None:
            breakdown[item.id] = False
            continue
        answer = answer.strip()
        if item.kind is QuestionKind.QAMC:
            breakdown[item.id] = answer.upper() == item.key
        else:
            try:
                breakdown[item.id] = abs(float(answer) - float(item.key)) <= tol
            except ValueError:
                breakdown[item.id] = False
    by_kind = {
        kind: ScoreCard(
            Unit.QUESTION,
            sum(breakdown[i] for i in ids),
            len(ids),
            {i: breakdown[i] for i in ids},
        )
        for kind, ids in by_kind_ids.items()
        if ids
    }
    overall = ScoreCard(Unit.QUESTION, sum(breakdown.values()), len(breakdown), breakdown)
    return QaReport(overall=overall, by_kind=by_kind)


def emit_question_bank(items: Sequence[QaItem], include_keys: bool = False) -> bytes:
    """Serialize the bank as JSON lines; keys are withheld unless asked for."""
    lines = []
    for item in items:
        record = {
            "id": item.id,
            "kind": item.kind.value,
            "question": item.question_text,
            "effect": item.effect.value,
            "sector": item.sector,
            "fund": item.fund,
            "period": item.period,
        }
        if item.options is not None:
            record["options"] = dict(zip(OPTION_LETTERS, item.options))
        if include_keys:
            record["key"] = item.key
        lines.append(json.dumps(record, sort_keys=True))
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def parse_question_bank(source: str | Path | IO[str]) -> list[QaItem]:
    """Parse a JSON-lines bank (with or without keys)."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    items: list[QaItem] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line {line_no}: invalid JSON ({exc.msg})") from None
        try:
            options = record.get("options")
            items.append(
                QaItem(
                    id=record["id"],
                    kind=QuestionKind(record["kind"]),
                    question_text=record["question"],
                    effect=EffectType(record["effect"]),
                    sector=record["sector"],
                    fund=record["fund"],
                    period=record["period"],
                    options=tuple(options[letter] for letter in OPTION_LETTERS)
                    if options
                    else None,
                    key=record.get("key", ""),
                )
            )
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"line {line_no}: malformed question record ({exc})") from None
    return items


ANSWER_KEY_COLUMNS = ("id", "kind", "answer")
SUBMISSION_COLUMNS = ("id", "answer")


def emit_answer_key(items: Sequence[QaItem]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(ANSWER_KEY_COLUMNS)
    for item in items:
        writer.writerow([item.id, item.kind.value, item.key])
    return buffer.getvalue().encode("utf-8")


def parse_answer_key(source: str | Path | IO[str]) -> list[QaItem]:
    """Parse an answer-key CSV into minimal key items (question text absent)."""
    rows = _read_csv(source)
    if not rows or rows[0] != list(ANSWER_KEY_COLUMNS):
        raise SchemaError(f"answer key must start with header {','.join(ANSWER_KEY_COLUMNS)}")
    items: list[QaItem] = []
    for row_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(ANSWER_KEY_COLUMNS):
            raise SchemaError(f"row {row_no}: expected {len(ANSWER_KEY_COLUMNS)} cells")
        try:
            kind = QuestionKind(row[1])
        except ValueError:
            raise SchemaError(f"row {row_no}: unknown question kind {row[1]!r}") from None
        items.append(
            QaItem(
                id=row[0],
                kind=kind,
                question_text="",
                effect=EffectType.TOTAL,
                sector="",
                fund="",
                period="",
                options=None,
                key=row[2],
            )
        )
    return items


def emit_submission(answers: Mapping[str, str]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SUBMISSION_COLUMNS)
    for question_id, answer in answers.items():
        writer.writerow([question_id, answer])
    return buffer.getvalue().encode("utf-8")


def parse_submission(source: str | Path | IO[str]) -> dict[str, str]:
    rows = _read_csv(source)
    if not rows or rows[0] != list(SUBMISSION_COLUMNS):
        raise SchemaError(f"submission must start with header {','.join(SUBMISSION_COLUMNS)}")
    answers: dict[str, str] = {}
    for row_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(SUBMISSION_COLUMNS):
            raise SchemaError(f"row {row_no}: expected {len(SUBMISSION_COLUMNS)} cells")
        if row[0] in answers:
            raise SchemaError(f"row {row_no}: duplicate answer for {row[0]!r}")
        answers[row[0]] = row[1]
    return answers


def emit_qa_scoreboard(report: QaReport) -> bytes:
    """Question-type scoreboard: correct counts, totals, and accuracy."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["Question Type", "Correct", "Total Questions", "Accuracy"])
    for kind in QuestionKind:
        card = report.by_kind.get(kind)
        if card is None:
            continue
        writer.writerow([kind.value, card.earned, card.possible, f"{card.accuracy:.0%}"])
    overall = report.overall
    writer.writerow(["Total", overall.earned, overall.possible, f"{overall.accuracy:.0%}"])
    return buffer.getvalue().encode("utf-8")


def _read_csv(source: str | Path | IO[str]) -> list[list[str]]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as handle:
            return list(csv.reader(handle))
    return list(csv.reader(source))
