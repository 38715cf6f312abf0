#!/usr/bin/env python3
"""Score agent sentences against the prescriptive references.

Reads a directory of response files, rebuilds the reference bullets from the
report, and prints ROUGE F1 tables. When an embedding sidecar is supplied
(one `id,v0,v1,...` record per line, ids `<pair>|candidate` and
`<pair>|reference`), a cosine table is printed as well; this tool never
computes embeddings itself.

    python scripts/score_sentences.py --responses /tmp/bench/factors \
        --truth /tmp/bench/objective2.csv [--embeddings vectors.csv]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from perfattrib.attribution import benchmark_total_return
from perfattrib.evaluation import (
    SentencePair,
    emit_cosine_table,
    emit_rouge_table,
    semantic_report,
)
from perfattrib.factors import ground_truth_factors, render_sentences
from perfattrib.records import EffectType
from perfattrib.report_io import (
    parse_embedding_sidecar,
    parse_objective_two,
    response_filename,
    slugify,
    split_agent_response,
)


def collect_pairs(responses: Path, truth: Path, family: str) -> list[SentencePair]:
    pairs: list[SentencePair] = []
    for holdings in parse_objective_two(truth):
        total_b = benchmark_total_return(holdings)
        assessments = ground_truth_factors(holdings)
        for rec in holdings.records:
            path = responses / response_filename(holdings.fund, holdings.period, rec.group)
            if not path.exists():
                continue
            response = split_agent_response(path.read_text(encoding="utf-8"))
            truth_pair = tuple(a for a in assessments if a.sector == rec.group)
            references = render_sentences(
                truth_pair, rec.benchmark_return, total_b, rec.portfolio_return
            )
            for effect, reference, candidate in zip(
                (EffectType.ALLOCATION, EffectType.SELECTION),
                references,
                response.bullets + ("",) * (2 - len(response.bullets)),
            ):
                pair_id = "|".join(
                    (slugify(holdings.fund), slugify(holdings.period),
                     slugify(rec.group), effect.value)
                )
                pairs.append(SentencePair(pair_id, family, effect, candidate, reference))
    return pairs


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--responses", type=Path, required=True)
    parser.add_argument("--truth", type=Path, required=True)
    parser.add_argument("--family", default="few_shot_1")
    parser.add_argument("--embeddings", type=Path)
    args = parser.parse_args()

    pairs = collect_pairs(args.responses, args.truth, args.family)
    if not pairs:
        print("no response files matched the report", file=sys.stderr)
        return 1
    embeddings = parse_embedding_sidecar(args.embeddings) if args.embeddings else None
    report = semantic_report(pairs, embeddings)
    print(emit_rouge_table(report).decode("utf-8"), end="")
    if embeddings is not None:
        print(emit_cosine_table(report).decode("utf-8"), end="")
        if report.skipped:
            print(f"skipped {len(report.skipped)} pair(s) without embeddings", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
