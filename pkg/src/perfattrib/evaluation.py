"""Scoring of agent outputs: keyword accuracy, numeric tables, text overlap.

Four scorers cover the grading surface: factor-keyword accuracy against the
classification key, cell-by-cell numeric accuracy against computed
attribution tables, ROUGE-1/2/L F1 over tokenized sentences, and cosine
similarity over externally produced embedding vectors. All scorers are pure;
none of them ever calls a model.
"""

from __future__ import annotations

import io
import csv
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .factors import FactorAssessment
from .records import AttributionTable, EffectType, Level
from .report_io import MacroValue, ResultRow

# Numeric-cell tolerances carry a tiny absolute slack so a value sitting
# exactly on a decimal rounding boundary cannot fail by one float ulp.
_SLACK = 1e-12

KEYWORD_VALUE_TOL = 5e-5
TABLE_VALUE_TOL = 1e-6


class Unit(Enum):
    SECTOR = "Sector"
    PORTFOLIO = "Portfolio"
    TABLE = "Table"
    QUESTION = "Question"


@dataclass(frozen=True)
class ScoreCard:
    """Earned/possible cells for one grading run, with a per-cell breakdown."""

    unit: Unit
    earned: int
    possible: int
    breakdown: Mapping[object, bool]

    def __post_init__(self) -> None:
        if not 0 <= self.earned <= self.possible:
            raise ValueError(f"earned {self.earned} outside [0, {self.possible}]")

    @property
    def accuracy(self) -> float:
        return self.earned / self.possible if self.possible else 0.0


def _values_close(predicted: float, truth: float, tol: float) -> bool:
    return abs(predicted - truth) <= tol + _SLACK


def keyword_accuracy(
    predicted: Sequence[FactorAssessment],
    truth: Sequence[FactorAssessment],
    value_tol: float = KEYWORD_VALUE_TOL,
) -> ScoreCard:
    """Score factor rows cell-by-cell against the classification key.

    Each (sector, effect) contributes three cells: the numeric value, the
    weight-stance column (which must be the literal None on selection), and
    the performance stance. Missing predictions score zero; duplicated
    predictions are a structural error.
    """
    truth_map = {(t.sector, t.effect_type): t for t in truth}
    if len(truth_map) != len(truth):
        raise ValueError("duplicate (sector, effect) rows in truth factors")
    predicted_map: dict[tuple[str, EffectType], FactorAssessment] = {}
    for row in predicted:
        key = (row.sector, row.effect_type)
        if key in predicted_map:
            raise ValueError(f"duplicate predicted factor row for {key}")
        predicted_map[key] = row
    breakdown: dict[tuple[str, str, str], bool] = {}
    for (sector, effect), want in truth_map.items():
        got = predicted_map.get((sector, effect))
        cells = {
            "Value": got is not None and _values_close(got.value, want.value, value_tol),
            "Sector Weight": got is not None and got.weight_stance == want.weight_stance,
            "Sector Performance": got is not None
            and got.performance_stance == want.performance_stance,
        }
        for cell, ok in cells.items():
            breakdown[(sector, effect.value, cell)] = ok
    earned = sum(breakdown.values())
    return ScoreCard(Unit.PORTFOLIO, earned, len(breakdown), breakdown)


Cell = tuple[str, EffectType, float]


def cells_from_result_rows(rows: Iterable[ResultRow]) -> list[Cell]:
    """Flatten result-file rows to (group, effect, value) cells."""
    cells: list[Cell] = []
    for row in rows:
        cells.append((row.group, EffectType.ALLOCATION, row.allocation))
        cells.append((row.group, EffectType.SELECTION, row.selection))
    return cells


def cells_from_macro_values(values: Iterable[MacroValue]) -> list[Cell]:
    return [(v.group, v.effect, v.value) for v in values]


def numeric_table_accuracy(
    predicted: Iterable[Cell],
    truth: AttributionTable,
    tol: float = TABLE_VALUE_TOL,
) -> ScoreCard:
    """Score predicted effect cells against a computed attribution table.

    The truth cells are every non-Total row's allocation and selection (the
    Total Contribution column is derived, so it is never scored). Predicted
    cells for unknown group labels are flagged wrong; prediction order is
    irrelevant.
    """
    truth_cells: dict[tuple[str, EffectType], tuple[Level, float]] = {}
    for row in truth.rows:
        if row.level is Level.TOTAL:
            continue
        truth_cells[(row.group, EffectType.ALLOCATION)] = (row.level, row.allocation)
        truth_cells[(row.group, EffectType.SELECTION)] = (row.level, row.selection)
    predicted_map: dict[tuple[str, EffectType], float] = {}
    unknown: list[str] = []
    for group, effect, value in predicted:
        if (group, effect) not in truth_cells:
            unknown.append(f"{group}/{effect.value}")
            continue
        predicted_map[(group, effect)] = value
    breakdown: dict[tuple[str, str, str], bool] = {}
    for (group, effect), (level, want) in truth_cells.items():
        got = predicted_map.get((group, effect))
        breakdown[(level.value, group, effect.value)] = got is not None and _values_close(
            got, want, tol
        )
    for label in unknown:
        breakdown[("Unknown", label, "flagged")] = False
    earned = sum(ok for key, ok in breakdown.items() if key[0] != "Unknown")
    possible = len(truth_cells)
    return ScoreCard(Unit.TABLE, earned, possible, breakdown)


class RougeVariant(Enum):
    R1 = "ROUGE-1"
    R2 = "ROUGE-2"
    RL = "ROUGE-L"


# Tokens are lowercase runs of letters and digits; interior decimal points
# are kept so numeric evidence like 0.0011 stays one token.
_TOKEN_RE = re.compile(r"[a-z0-9]+(?:\.[a-z0-9]+)*")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _f1(match: float, candidate_total: int, reference_total: int) -> float:
    # 2PR/(P+R) with P = m/c and R = m/r reduces to 2m/(c+r); the single
    # division keeps textbook fractions like 2/3 exact.
    if candidate_total == 0 or reference_total == 0 or match == 0:
        return 0.0
    return 2 * match / (candidate_total + reference_total)


def _ngram_counts(tokens: Sequence[str], n: int) -> dict[tuple[str, ...], int]:
    counts: dict[tuple[str, ...], int] = {}
    for i in range(len(tokens) - n + 1):
        gram = tuple(tokens[i : i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for j, other in enumerate(b):
            if token == other:
                current.append(previous[j] + 1)
            else:
                current.append(max(previous[j + 1], current[j]))
        previous = current
    return previous[len(b)]


def rouge_f1(candidate: str, reference: str, variant: RougeVariant) -> float:
    """Token-overlap F1 between two texts under the chosen variant."""
    candidate_tokens = tokenize(candidate)
    reference_tokens = tokenize(reference)
    if variant is RougeVariant.RL:
        match = _lcs_length(candidate_tokens, reference_tokens)
        return _f1(match, len(candidate_tokens), len(reference_tokens))
    n = 1 if variant is RougeVariant.R1 else 2
    candidate_grams = _ngram_counts(candidate_tokens, n)
    reference_grams = _ngram_counts(reference_tokens, n)
    match = sum(
        min(count, reference_grams.get(gram, 0)) for gram, count in candidate_grams.items()
    )
    return _f1(
        match,
        max(len(candidate_tokens) - n + 1, 0),
        max(len(reference_tokens) - n + 1, 0),
    )


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1]."""
    va = np.asarray(a, dtype=float)
    vb = np.asarray(b, dtype=float)
    if va.shape != vb.shape or va.ndim != 1:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    norm_a = float(np.linalg.norm(va))
    norm_b = float(np.linalg.norm(vb))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine similarity of a zero vector is undefined")
    return float(np.clip(np.dot(va, vb) / (norm_a * norm_b), -1.0, 1.0))


@dataclass(frozen=True)
class SentencePair:
    """One candidate/reference sentence pair to score."""

    pair_id: str
    family: str
    effect: EffectType
    candidate: str
    reference: str


@dataclass(frozen=True)
class SemanticCell:
    family: str
    effect: EffectType
    metric: str
    mean: float
    count: int


@dataclass(frozen=True)
class SemanticReport:
    cells: tuple[SemanticCell, ...]
    skipped: tuple[str, ...]

    def mean(self, family: str, effect: EffectType, metric: str) -> float:
        for cell in self.cells:
            if (cell.family, cell.effect, cell.metric) == (family, effect, metric):
                return cell.mean
        raise KeyError((family, effect.value, metric))


COSINE_METRIC = "cosine"
_ROUGE_METRICS = (
    (RougeVariant.R1, "rouge1"),
    (RougeVariant.R2, "rouge2"),
    (RougeVariant.RL, "rougeL"),
)


def embedding_key(pair_id: str, side: str) -> str:
    return f"{pair_id}|{side}"


def semantic_report(
    pairs: Sequence[SentencePair],
    embeddings: Mapping[str, Sequence[float]] | None = None,
) -> SemanticReport:
    """Aggregate per-(family, effect) means of ROUGE F1 and cosine similarity.

    Pairs without both embedding vectors are skipped on the cosine path (and
    reported); ROUGE is always computed from the texts themselves.
    """
    scores: dict[tuple[str, EffectType, str], list[float]] = {}
    skipped: list[str] = []
    order: list[tuple[str, EffectType]] = []
    for pair in pairs:
        if (pair.family, pair.effect) not in order:
            order.append((pair.family, pair.effect))
        for variant, metric in _ROUGE_METRICS:
            scores.setdefault((pair.family, pair.effect, metric), []).append(
                rouge_f1(pair.candidate, pair.reference, variant)
            )
        if embeddings is None:
            continue
        cand = embeddings.get(embedding_key(pair.pair_id, "candidate"))
        ref = embeddings.get(embedding_key(pair.pair_id, "reference"))
        if cand is None or ref is None:
            skipped.append(pair.pair_id)
            continue
        scores.setdefault((pair.family, pair.effect, COSINE_METRIC), []).append(
            cosine_similarity(cand, ref)
        )
    cells = []
    metrics = [metric for _, metric in _ROUGE_METRICS] + [COSINE_METRIC]
    for family, effect in order:
        for metric in metrics:
            values = scores.get((family, effect, metric))
            if values:
                cells.append(
                    SemanticCell(family, effect, metric, math.fsum(values) / len(values), len(values))
                )
    return SemanticReport(tuple(cells), tuple(skipped))


def _percent(ratio: float) -> str:
    return f"{ratio:.0%}"


def emit_cosine_table(report: SemanticReport) -> bytes:
    """Cosine means laid out as one row per prompt family."""
    return _emit_family_table(report, [(COSINE_METRIC, "")])


def emit_rouge_table(report: SemanticReport) -> bytes:
    """ROUGE F1 means laid out as one row per prompt family."""
    return _emit_family_table(
        report, [("rouge1", " ROUGE-1"), ("rouge2", " ROUGE-2"), ("rougeL", " ROUGE-L")]
    )


def _emit_family_table(report: SemanticReport, metrics: list[tuple[str, str]]) -> bytes:
    families: list[str] = []
    for cell in report.cells:
        if cell.family not in families:
            families.append(cell.family)
    effects = (EffectType.ALLOCATION, EffectType.SELECTION)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["Family"]
        + [f"{effect.value}{suffix}" for effect in effects for _, suffix in metrics]
    )
    for family in families:
        row: list[str] = [family]
        for effect in effects:
            for metric, _ in metrics:
                try:
                    row.append(f"{report.mean(family, effect, metric):.4f}")
                except KeyError:
                    row.append("")
        writer.writerow(row)
    return buffer.getvalue().encode("utf-8")


def emit_micro_scoreboard(
    entries: Sequence[tuple[AttributionTable, ScoreCard]],
) -> bytes:
    """Fund-by-fund micro scoreboard: sector block plus one row per parent."""
    return _emit_scoreboard(entries, include_sectors=True)


def emit_macro_scoreboard(
    entries: Sequence[tuple[AttributionTable, ScoreCard]],
) -> bytes:
    """Fund-by-fund macro scoreboard over parent cells only."""
    return _emit_scoreboard(entries, include_sectors=False)


def _tally(
    cards: Iterable[tuple[AttributionTable, ScoreCard]],
    level: str | None,
    group: str | None,
) -> tuple[dict[EffectType, int], dict[EffectType, int]]:
    earned = {EffectType.ALLOCATION: 0, EffectType.SELECTION: 0}
    possible = {EffectType.ALLOCATION: 0, EffectType.SELECTION: 0}
    for _, card in cards:
        for key, ok in card.breakdown.items():
            cell_level, cell_group, cell_effect = key
            if cell_level == "Unknown":
                continue
            if level is not None and cell_level != level:
                continue
            if group is not None and cell_group != group:
                continue
            effect = EffectType(cell_effect)
            possible[effect] += 1
            earned[effect] += int(ok)
    return earned, possible


def _scoreboard_row(
    label: str, cards: Sequence[tuple[AttributionTable, ScoreCard]],
    level: str | None = None, group: str | None = None,
) -> list[str]:
    earned, possible = _tally(cards, level, group)
    row = [label]
    for effect in (EffectType.ALLOCATION, EffectType.SELECTION):
        total = possible[effect]
        row.append(str(earned[effect]))
        row.append(_percent(earned[effect] / total) if total else "")
    return row


def _emit_scoreboard(
    entries: Sequence[tuple[AttributionTable, ScoreCard]], include_sectors: bool
) -> bytes:
    by_fund: dict[str, list[tuple[AttributionTable, ScoreCard]]] = {}
    for table, card in entries:
        fund = table.rows[0].fund if table.rows else ""
        by_fund.setdefault(fund, []).append((table, card))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "Group",
            "Allocation Effect Score",
            "Allocation Accuracy",
            "Selection Effect Score",
            "Selection Accuracy",
        ]
    )
    for fund, cards in by_fund.items():
        writer.writerow(_scoreboard_row(f"Portfolio {fund}" if not fund.startswith("Portfolio") else fund, cards))
        if include_sectors:
            writer.writerow(_scoreboard_row("Sectors", cards, level=Level.SECTOR.value))
        parents: list[str] = []
        for table, _ in cards:
            for row in table.parent_rows():
                if row.group not in parents:
                    parents.append(row.group)
        for parent in parents:
            writer.writerow(
                _scoreboard_row(parent, cards, level=Level.PARENT.value, group=parent)
            )
    if include_sectors:
        writer.writerow(_scoreboard_row("Total Sectors", list(entries), level=Level.SECTOR.value))
        writer.writerow(_scoreboard_row("Total Types", list(entries), level=Level.PARENT.value))
    else:
        writer.writerow(_scoreboard_row("Grand Total", list(entries)))
    return buffer.getvalue().encode("utf-8")
