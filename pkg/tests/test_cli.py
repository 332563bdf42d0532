"""Command-line front end: exit codes, file outputs, replay."""

import csv
import json

import pytest

from pulsering import cli


def run_cli(*argv):
    return cli.main(list(argv))


class TestRunCommand:
    def test_exact_totals_sweep(self, tmp_path, capsys):
        code = run_cli(
            "run", "--protocol", "a2", "--ids", "1,2,3",
            "--seeds", "0..19", "--out-dir", str(tmp_path),
        )
        assert code == cli.EXIT_OK
        assert "totals [21, 21]" in capsys.readouterr().out
        with open(tmp_path / "report-a2.csv") as fh:
            row = next(csv.DictReader(fh))
        assert row["total_pulses_min"] == row["total_pulses_max"] == "21"
        assert row["all_invariants_pass"] == "True"

    def test_random_ports_constant_total(self, tmp_path, capsys):
        code = run_cli(
            "run", "--protocol", "a3a", "--ids", "1,2", "--ports", "random",
            "--seeds", "0..19", "--out-dir", str(tmp_path),
        )
        assert code == cli.EXIT_OK
        assert "totals [14, 14]" in capsys.readouterr().out

    def test_duplicate_ids_accepted_with_note(self, tmp_path, capsys):
        code = run_cli(
            "run", "--protocol", "a1", "--ids", "1,1",
            "--seeds", "0", "--out-dir", str(tmp_path),
        )
        assert code == cli.EXIT_OK
        out = capsys.readouterr().out
        assert "2 leaders" in out
        assert "totals [2, 2]" in out

    def test_duplicate_ids_usage_error_for_terminating(self, tmp_path):
        code = run_cli(
            "run", "--protocol", "a2", "--ids", "1,1",
            "--seeds", "0", "--out-dir", str(tmp_path),
        )
        assert code == cli.EXIT_USAGE

    def test_missing_ids_is_usage_error(self, tmp_path):
        code = run_cli("run", "--protocol", "a1", "--out-dir", str(tmp_path))
        assert code == cli.EXIT_USAGE

    def test_generated_distinct_ids(self, tmp_path):
        code = run_cli(
            "run", "--protocol", "a2", "--n", "5", "--id-max", "40",
            "--seeds", "0..4", "--out-dir", str(tmp_path),
        )
        assert code == cli.EXIT_OK

    def test_sampled_ids_protocol(self, tmp_path):
        code = run_cli(
            "run", "--protocol", "a4+a3b", "--n", "4", "--c", "2.0",
            "--bit-cap", "8", "--ports", "random",
            "--seeds", "0..4", "--out-dir", str(tmp_path),
        )
        assert code == cli.EXIT_OK

    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text(json.dumps({"protocol": "a2", "ids": "1,2", "seeds": "0..3"}))
        code = run_cli(
            "run", "--protocol", "a2", "--config", str(config),
            "--seeds", "5..6", "--out-dir", str(tmp_path),
            "--report-out", "override.json",
        )
        assert code == cli.EXIT_OK
        report = json.loads((tmp_path / "override.json").read_text())
        assert report["summary"]["seeds"] == "5..6"
        assert report["summary"]["IDmax"] == 2


class TestReplayCommand:
    def test_replay_emitted_trace(self, tmp_path, capsys):
        assert run_cli(
            "run", "--protocol", "a2", "--ids", "2,4,1", "--seeds", "7",
            "--trace-out", "tr", "--out-dir", str(tmp_path),
        ) == cli.EXIT_OK
        code = run_cli("replay", str(tmp_path / "tr-7.jsonl"))
        assert code == cli.EXIT_OK
        assert "identical" in capsys.readouterr().out

    def test_edited_trace_diverges(self, tmp_path, capsys):
        run_cli(
            "run", "--protocol", "a2", "--ids", "2,4,1", "--seeds", "7",
            "--trace-out", "tr", "--out-dir", str(tmp_path),
        )
        path = tmp_path / "tr-7.jsonl"
        lines = path.read_text().splitlines()
        for i, line in enumerate(lines):
            rec = json.loads(line)
            if rec.get("type") == "deliver":
                rec["recv"][0] += 1
                lines[i] = json.dumps(rec, sort_keys=True)
                break
        path.write_text("\n".join(lines) + "\n")
        code = run_cli("replay", str(path))
        assert code == cli.EXIT_INVARIANT
        assert "diverged at event index" in capsys.readouterr().out

    def test_missing_file_is_usage_error(self, tmp_path):
        assert run_cli("replay", str(tmp_path / "nope.jsonl")) == cli.EXIT_USAGE


class TestLowerBoundCommand:
    def test_witness_meets_bound(self, tmp_path, capsys):
        code = run_cli(
            "lowerbound", "--protocol", "a2", "--k", "64", "--n", "2",
            "--out-dir", str(tmp_path),
        )
        assert code == cli.EXIT_OK
        out = capsys.readouterr().out
        assert "bound=10" in out
        report = json.loads((tmp_path / "lowerbound-a2.json").read_text())
        assert report["bound_met"]

    def test_trivial_bound(self, tmp_path):
        code = run_cli(
            "lowerbound", "--protocol", "a2", "--k", "8", "--n", "8",
            "--out-dir", str(tmp_path),
        )
        assert code == cli.EXIT_OK


class TestSeedParsing:
    def test_forms(self):
        assert cli.parse_seeds("7") == [7]
        assert cli.parse_seeds("0..3") == [0, 1, 2, 3]
        assert cli.parse_seeds("1,5,9") == [1, 5, 9]

    def test_empty_rejected(self):
        with pytest.raises(Exception):
            cli.parse_seeds(" , ")
