"""Command line surface: flags, outputs, config layering, exit codes."""

import csv
import subprocess
import sys

import pytest

from polarscale.harness import load_reports
from polarscale.harness.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_kv(out: str) -> dict:
    values = {}
    for line in out.splitlines():
        if " = " in line:
            key, _, value = line.partition(" = ")
            values[key] = value
    return values


class TestScalarCommands:
    def test_cdf(self, capsys):
        code, out, _ = run(capsys, "cdf", "--eps", "0.5", "--n", "12",
                           "--threshold-loglog", "4.8")
        assert code == 0
        assert float(parse_kv(out)["F"]) == 0.29052734375

    def test_enx(self, capsys):
        code, out, _ = run(capsys, "enx", "--n", "100", "--x", "0.5")
        kv = parse_kv(out)
        assert code == 0
        assert kv["e"] == "51"
        assert float(kv["gaussian"]) == 50.0
        assert float(kv["slack"]) > 0.0

    def test_overlap(self, capsys):
        code, out, _ = run(capsys, "overlap", "--eps", "0.25", "--n", "8",
                           "--rate", "0.5")
        assert code == 0
        assert float(parse_kv(out)["overlap"]) == 0.7578125

    def test_map_bound(self, capsys):
        code, out, _ = run(capsys, "map-bound", "--eps", "0.5", "--n", "4",
                           "--rate", "0.25")
        kv = parse_kv(out)
        assert code == 0
        assert kv["min_weight"] == "3"
        assert float(kv["neg_log2"]) == 17.0
        assert float(kv["value"]) == 2.0 ** -17

    def test_sc_sim(self, capsys):
        code, out, _ = run(capsys, "sc-sim", "--eps", "0.5", "--n", "3",
                           "--rate", "0.25", "--trials", "2000", "--seed", "7")
        kv = parse_kv(out)
        assert code == 0
        assert 0.0 <= float(kv["block_error"]) <= 1.0
        assert float(kv["ci_halfwidth"]) > 0.0

    def test_fit(self, capsys):
        code, out, _ = run(capsys, "fit", "--eps", "0.5", "--rate", "0.3",
                           "--ns", "8,12,16,20")
        kv = parse_kv(out)
        assert code == 0
        assert 0.3 < float(kv["a"]) < 0.7
        assert float(kv["reference_a"]) == 0.5


class TestTables:
    def test_enumerate_csv(self, capsys, tmp_path):
        path = tmp_path / "leaves.csv"
        code, _, _ = run(capsys, "enumerate", "--eps", "0.5", "--n", "3",
                         "--out", str(path))
        assert code == 0
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["id", "weight", "L", "regime"]
        assert len(rows) == 9
        assert rows[1][0] == "0" and rows[1][1] == "0"
        assert rows[7][1] == "2"  # id 6 has weight 2
        assert all(row[3] in ("LO", "MID", "HI") for row in rows[1:])

    def test_enumerate_stdout(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--eps", "0.5", "--n", "1")
        lines = out.strip().splitlines()
        assert code == 0
        assert lines[0] == "id,weight,L,regime"
        assert len(lines) == 3

    def test_select_rule_flag(self, capsys, tmp_path):
        path = tmp_path / "sel.csv"
        code, _, _ = run(capsys, "select", "--eps", "0.5", "--n", "3",
                         "--rate", "0.5", "--rule", "rm", "--out", str(path))
        assert code == 0
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["id", "weight", "L"]
        assert [int(r[0]) for r in rows[1:]] == [3, 5, 6, 7]

    def test_select_bad_rule(self, capsys):
        code, _, err = run(capsys, "select", "--eps", "0.5", "--n", "3",
                           "--rate", "0.5", "--rule", "best")
        assert code == 2
        assert "rule" in err


class TestVerifyCommand:
    def test_pass_exit_zero(self, capsys):
        code, out, _ = run(capsys, "verify", "fixed-point")
        assert code == 0
        assert "FIXED-POINT" in out and "PASS" in out

    def test_vacuous_is_acceptable(self, capsys):
        code, out, _ = run(capsys, "verify", "lemma3", "--ns", "4",
                           "--mode", "exact")
        assert code == 0
        assert "VACUOUS" in out

    def test_fail_exit_one(self, capsys):
        # at tiny depths the below-half curve cannot reach capacity
        code, out, _ = run(capsys, "verify", "theorem1", "--ns", "4,6")
        assert code == 1
        assert "FAIL" in out

    def test_domain_error_exit_two(self, capsys):
        code, _, err = run(capsys, "verify", "lemma5", "--e0", "2.0")
        assert code == 2
        assert "e0" in err

    def test_unknown_claim_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["verify", "lemma2"])

    def test_reports_file(self, capsys, tmp_path):
        path = tmp_path / "reports.jsonl"
        code, _, _ = run(capsys, "verify", "lemma4", "--ns", "0,2,4",
                         "--out", str(path))
        assert code == 0
        reports = load_reports(path)
        assert [r.parameters["n"] for r in reports] == [0, 2, 4]
        assert all(r.claim_id == "LEMMA4" for r in reports)

    def test_claim_defaults_applied(self, capsys):
        code, out, _ = run(capsys, "verify", "lemma4")
        assert code == 0
        assert len(out.strip().splitlines()) == 6  # default ns 0,4,...,20


class TestConfigLayering:
    def test_config_sets_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "lab.cfg"
        cfg.write_text("eps=0.25\nns=8,10\n# comment line\n\n")
        code, out, _ = run(capsys, "--config", str(cfg), "verify", "corollary1")
        assert code == 0
        assert "n" not in parse_kv(out)  # report line, not kv output
        assert "eps=0.25" in out

    def test_flags_beat_config(self, capsys, tmp_path):
        cfg = tmp_path / "lab.cfg"
        cfg.write_text("threshold-loglog=4.8\neps=0.25\n")
        code, out, _ = run(capsys, "--config", str(cfg), "cdf",
                           "--eps", "0.5", "--n", "12")
        assert code == 0
        # eps flag won, threshold came from the config
        assert float(parse_kv(out)["F"]) == 0.29052734375

    def test_malformed_config(self, capsys, tmp_path):
        cfg = tmp_path / "lab.cfg"
        cfg.write_text("eps 0.5\n")
        code, _, err = run(capsys, "--config", str(cfg), "verify", "fixed-point")
        assert code == 2
        assert "line 1" in err

    def test_missing_required_parameter(self, capsys):
        code, _, err = run(capsys, "cdf", "--eps", "0.5", "--n", "12")
        assert code == 2
        assert "threshold-loglog" in err


def test_console_script_entry():
    result = subprocess.run(
        [sys.executable, "-m", "polarscale.harness.cli", "enx", "--n", "16", "--x", "0.5"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "e = 9" in result.stdout
