#!/usr/bin/env python3
"""Run the full benchmark loop offline and print every score.

Generates a corpus, lets the deterministic oracle answer all four tasks,
optionally corrupts a fraction of the answers, and grades everything. With
no corruption every score is 100%; the --corruption-rate flag shows how the
graders degrade.

    python scripts/run_benchmark.py --seed 7 --workdir /tmp/bench
    python scripts/run_benchmark.py --seed 7 --workdir /tmp/bench --corruption-rate 0.1
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from perfattrib.cli import main as cli_main
from perfattrib.qa import emit_submission, parse_submission
from perfattrib.report_io import write_bytes_atomic


def _corrupt_submission(path: Path, rate: float, rng: np.random.Generator) -> int:
    answers = parse_submission(path)
    flipped = 0
    for question_id in list(answers):
        if rng.random() < rate:
            answers[question_id] = "E"
            flipped += 1
    write_bytes_atomic(path, emit_submission(answers))
    return flipped


def _corrupt_results(result_dir: Path, rate: float, rng: np.random.Generator) -> int:
    corrupted = 0
    for path in sorted(result_dir.glob("*.csv")):
        lines = path.read_text(encoding="utf-8").splitlines()
        for i, line in enumerate(lines[1:], start=1):
            cells = line.split(",")
            if len(cells) < 3 or not cells[1].replace(".", "").replace("-", "").isdigit():
                continue
            if rng.random() < rate:
                cells[1] = f"{float(cells[1]) + 0.05:.6f}"
                lines[i] = ",".join(cells)
                corrupted += 1
        write_bytes_atomic(path, ("\n".join(lines) + "\n").encode("utf-8"))
    return corrupted


def run(seed: int, workdir: Path, corruption_rate: float) -> int:
    rng = np.random.default_rng(seed + 1)
    corpus = workdir / "objective2.csv"
    steps = [["gen-data", "--seed", str(seed), "--out-dir", str(workdir)]]
    steps += [
        ["oracle-respond", "--input", str(corpus), "--task", task,
         "--out-dir", str(workdir / task)]
        for task in ("factors", "micro", "macro")
    ]
    steps += [
        ["gen-qa", "--corpus", str(workdir), "--n", "140", "--seed", str(seed),
         "--out", str(workdir / "bank.jsonl"), "--keys", str(workdir / "keys.csv")],
        ["oracle-respond", "--input", str(corpus), "--task", "qa",
         "--out-dir", str(workdir / "qa"), "--bank", str(workdir / "bank.jsonl")],
    ]
    for step in steps:
        if cli_main(step) != 0:
            return 1

    if corruption_rate > 0:
        flipped = _corrupt_submission(workdir / "qa" / "submission.csv", corruption_rate, rng)
        broken = _corrupt_results(workdir / "micro", corruption_rate, rng)
        print(f"corrupted {flipped} answers and {broken} micro cells")

    grade_steps = [
        ["grade", "--kind", "factors", "--pred", str(workdir / "factors"),
         "--truth", str(corpus), "--out", str(workdir / "factor_scores.csv")],
        ["grade", "--kind", "tables", "--pred", str(workdir / "micro"),
         "--truth", str(corpus), "--out", str(workdir / "scores.csv")],
        ["grade", "--kind", "tables", "--pred", str(workdir / "macro"),
         "--truth", str(corpus), "--out", str(workdir / "scores.csv")],
        ["grade", "--kind", "qa", "--pred", str(workdir / "qa" / "submission.csv"),
         "--truth", str(workdir / "keys.csv"), "--out", str(workdir / "qa_scores.csv")],
    ]
    for step in grade_steps:
        if cli_main(step) != 0:
            return 1
    print(f"score files under {workdir}")
    return 0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--workdir", type=Path, default=Path("bench_out"))
    parser.add_argument("--corruption-rate", type=float, default=0.0)
    args = parser.parse_args()
    args.workdir.mkdir(parents=True, exist_ok=True)
    return run(args.seed, args.workdir, args.corruption_rate)


if __name__ == "__main__":
    sys.exit(main())
