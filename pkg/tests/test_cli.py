"""End-to-end subcommand behavior, exit codes, and config handling."""

from __future__ import annotations

import shutil

import pytest

from perfattrib.cli import main
from perfattrib.qa import parse_question_bank, parse_submission
from perfattrib.report_io import (
    parse_macro_result,
    parse_objective_two,
    parse_result_file,
)

from conftest import DATA_DIR


@pytest.fixture
def sample2(tmp_path):
    target = tmp_path / "sample_objective2.csv"
    shutil.copy(DATA_DIR / "sample_objective2.csv", target)
    return target


class TestCompute:
    def test_micro_counts(self, tmp_path, sample2):
        out = tmp_path / "micro.csv"
        assert main(["compute", "--input", str(sample2), "--mode", "micro", "--out", str(out)]) == 0
        rows = parse_result_file(out)
        assert len(rows) == 2 * (12 + 3)

    def test_macro_values(self, tmp_path, sample2):
        out = tmp_path / "macro.csv"
        assert main(["compute", "--input", str(sample2), "--mode", "macro", "--out", str(out)]) == 0
        values = parse_macro_result(out)
        assert len(values) == 2 * 3 * 2

    def test_manager_example_through_both_modes(self, tmp_path, manager_example):
        from perfattrib.report_io import emit_objective_two

        report = tmp_path / "managers.csv"
        report.write_bytes(emit_objective_two([manager_example]))
        micro_out, macro_out = tmp_path / "micro.csv", tmp_path / "macro.csv"
        assert main(["compute", "--input", str(report), "--mode", "micro", "--out", str(micro_out)]) == 0
        assert main(["compute", "--input", str(report), "--mode", "macro", "--out", str(macro_out)]) == 0
        micro_rows = {r.group: r for r in parse_result_file(micro_out)}
        small = micro_rows["Small-cap value equities"]
        assert small.selection == pytest.approx(0.0017, abs=5e-5)
        assert small.allocation == pytest.approx(-0.0008, abs=5e-5)
        macro_values = {(v.group, v.effect.value): v.value for v in parse_macro_result(macro_out)}
        assert macro_values[("Value Portfolio Manager", "Selection")] == pytest.approx(0.0052, abs=5e-5)
        assert macro_values[("Value Portfolio Manager", "Allocation")] == pytest.approx(0.0001, abs=5e-5)
        assert macro_values[("Growth Portfolio Manager", "Selection")] == pytest.approx(0.0042, abs=5e-5)

    def test_single_mode_accepts_first_schema(self, tmp_path):
        out = tmp_path / "single.csv"
        code = main(
            [
                "compute",
                "--input", str(DATA_DIR / "sample_objective1.csv"),
                "--mode", "single",
                "--out", str(out),
            ]
        )
        assert code == 0
        rows = parse_result_file(out)
        assert len(rows) == 24

    def test_sort_by_total_reorders_rows(self, tmp_path, sample2):
        out = tmp_path / "sorted.csv"
        assert main(
            [
                "compute", "--input", str(sample2), "--mode", "micro",
                "--out", str(out), "--sort-by-total",
            ]
        ) == 0
        rows = parse_result_file(out)
        sectors = [r for r in rows if r.level.value == "Sector"][:12]
        totals = [r.total for r in sectors]
        assert totals == sorted(totals, reverse=True)

    def test_multilevel_requires_parent_column(self, tmp_path, capsys):
        out = tmp_path / "na.csv"
        code = main(
            [
                "compute",
                "--input", str(DATA_DIR / "sample_objective1.csv"),
                "--mode", "micro",
                "--out", str(out),
            ]
        )
        assert code == 2
        assert "no parent group" in capsys.readouterr().err

    def test_empty_input_fails(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        code = main(["compute", "--input", str(empty), "--mode", "single", "--out", str(tmp_path / "o.csv")])
        assert code == 2
        assert "empty file" in capsys.readouterr().err


class TestGenData:
    def test_writes_both_corpora_deterministically(self, tmp_path):
        for name in ("a", "b"):
            assert main(["gen-data", "--seed", "21", "--out-dir", str(tmp_path / name)]) == 0
        for filename in ("objective1.csv", "objective2.csv"):
            assert (tmp_path / "a" / filename).read_bytes() == (
                tmp_path / "b" / filename
            ).read_bytes()
        slices = parse_objective_two(tmp_path / "a" / "objective2.csv")
        assert len(slices) == 12


class TestGenQa:
    def test_bank_and_keys(self, tmp_path):
        assert main(["gen-data", "--seed", "21", "--out-dir", str(tmp_path)]) == 0
        bank_path = tmp_path / "bank.jsonl"
        keys_path = tmp_path / "keys.csv"
        code = main(
            [
                "gen-qa",
                "--corpus", str(tmp_path),
                "--n", "140",
                "--seed", "4",
                "--out", str(bank_path),
                "--keys", str(keys_path),
            ]
        )
        assert code == 0
        items = parse_question_bank(bank_path)
        assert len(items) == 140
        assert all(item.key == "" for item in items)  # public bank withholds keys


class TestOracleAndGrade:
    @pytest.fixture
    def workdir(self, tmp_path):
        assert main(["gen-data", "--seed", "33", "--out-dir", str(tmp_path)]) == 0
        return tmp_path

    def test_factor_responses_and_grading(self, workdir, capsys):
        responses = workdir / "responses"
        corpus = workdir / "objective2.csv"
        assert main(
            ["oracle-respond", "--input", str(corpus), "--task", "factors", "--out-dir", str(responses)]
        ) == 0
        assert len(list(responses.glob("*.txt"))) == 144
        out = workdir / "factor_scores.csv"
        code = main(
            [
                "grade", "--kind", "factors",
                "--pred", str(responses), "--truth", str(corpus), "--out", str(out),
            ]
        )
        assert code == 0
        assert "864/864 (100%)" in capsys.readouterr().out
        assert out.read_text().splitlines()[-1].startswith("Total,,864,864")

    def test_table_results_and_grading(self, workdir, capsys):
        corpus = workdir / "objective2.csv"
        for task in ("micro", "macro"):
            results = workdir / task
            assert main(
                ["oracle-respond", "--input", str(corpus), "--task", task, "--out-dir", str(results)]
            ) == 0
            assert len(list(results.glob("*.csv"))) == 12
            code = main(
                ["grade", "--kind", "tables", "--pred", str(results), "--truth", str(corpus)]
            )
            assert code == 0
        output = capsys.readouterr().out
        assert "micro accuracy: 360/360 (100%)" in output
        assert "macro accuracy: 72/72 (100%)" in output

    def test_qa_round_trip(self, workdir, capsys):
        corpus = workdir / "objective2.csv"
        bank = workdir / "bank.jsonl"
        keys = workdir / "keys.csv"
        assert main(
            [
                "gen-qa", "--corpus", str(workdir), "--n", "140", "--seed", "9",
                "--out", str(bank), "--keys", str(keys),
            ]
        ) == 0
        assert main(
            [
                "oracle-respond", "--input", str(corpus), "--task", "qa",
                "--out-dir", str(workdir), "--bank", str(bank),
            ]
        ) == 0
        submission = workdir / "submission.csv"
        assert len(parse_submission(submission)) == 140
        code = main(
            ["grade", "--kind", "qa", "--pred", str(submission), "--truth", str(keys)]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "QAMC: 70/70 (100%)" in out
        assert "QCalc: 70/70 (100%)" in out

    def test_qa_task_requires_bank(self, workdir, capsys):
        code = main(
            [
                "oracle-respond", "--input", str(workdir / "objective2.csv"),
                "--task", "qa", "--out-dir", str(workdir),
            ]
        )
        assert code == 2
        assert "requires --bank" in capsys.readouterr().err

    def test_grading_detects_corruption(self, workdir, capsys):
        corpus = workdir / "objective2.csv"
        results = workdir / "micro"
        main(["oracle-respond", "--input", str(corpus), "--task", "micro", "--out-dir", str(results)])
        victim = sorted(results.glob("*.csv"))[0]
        text = victim.read_text()
        lines = text.splitlines()
        cells = lines[1].split(",")
        cells[1] = "0.420000"
        lines[1] = ",".join(cells)
        victim.write_text("\n".join(lines) + "\n")
        # degraded scores still exit zero; only structural failures are fatal
        assert main(["grade", "--kind", "tables", "--pred", str(results), "--truth", str(corpus)]) == 0
        assert "359/360" in capsys.readouterr().out

    def test_grade_structural_failure_exits_nonzero(self, workdir, capsys):
        missing = workdir / "nowhere.csv"
        code = main(
            ["grade", "--kind", "qa", "--pred", str(missing), "--truth", str(missing)]
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestConfig:
    def test_config_supplies_seed_and_flags_override(self, tmp_path):
        config = tmp_path / "bench.conf"
        config.write_text("seed = 21  # corpus seed\nn = 140\n")
        assert main(["--config", str(config), "gen-data", "--out-dir", str(tmp_path / "c")]) == 0
        assert main(["gen-data", "--seed", "21", "--out-dir", str(tmp_path / "d")]) == 0
        assert (tmp_path / "c" / "objective2.csv").read_bytes() == (
            tmp_path / "d" / "objective2.csv"
        ).read_bytes()
        assert main(["--config", str(config), "gen-data", "--seed", "5", "--out-dir", str(tmp_path / "e")]) == 0
        assert (tmp_path / "e" / "objective2.csv").read_bytes() != (
            tmp_path / "c" / "objective2.csv"
        ).read_bytes()

    def test_malformed_config_line_fails(self, tmp_path, capsys):
        config = tmp_path / "bad.conf"
        config.write_text("just words\n")
        code = main(["--config", str(config), "gen-data", "--out-dir", str(tmp_path)])
        assert code == 2
        assert "key=value" in capsys.readouterr().err

    def test_unknown_flag_exits_via_parser(self):
        with pytest.raises(SystemExit):
            main(["gen-data", "--bogus"])
