"""Report records and their newline-delimited round trip."""

import json
import math

import pytest

from polarscale.errors import DomainError, ReportParseError
from polarscale.harness import SCHEMA_VERSION, VerificationReport, Verdict, load_reports, report_io


def sample_reports():
    return [
        VerificationReport(
            claim_id="LEMMA4",
            parameters={"eps": 0.5, "n": 4},
            empirical=0.2617,
            bound=0.3660,
            verdict=Verdict.PASS,
        ),
        VerificationReport(
            claim_id="LEMMA1",
            parameters={"z0": 1e-4, "beta": 1.0, "n": 60, "trials": 1000},
            empirical=0.999,
            bound=0.97172,
            sigma=0.001,
            verdict=Verdict.PASS,
            seed=7,
        ),
        VerificationReport(
            claim_id="LEMMA3",
            parameters={"part": "a", "rho": 0.96, "n": 4},
            empirical=0.9,
            bound=-0.5,
            verdict=Verdict.VACUOUS,
        ),
    ]


class TestVerdict:
    def test_acceptable(self):
        assert Verdict.PASS.acceptable
        assert Verdict.VACUOUS.acceptable
        assert not Verdict.FAIL.acceptable


class TestRecordValidation:
    def test_rejects_blank_claim(self):
        with pytest.raises(DomainError):
            VerificationReport(
                claim_id="", parameters={}, empirical=0.5, bound=0.5, verdict=Verdict.PASS
            )

    def test_rejects_nan(self):
        with pytest.raises(DomainError):
            VerificationReport(
                claim_id="X", parameters={}, empirical=math.nan, bound=0.5,
                verdict=Verdict.PASS,
            )

    def test_rejects_negative_sigma(self):
        with pytest.raises(DomainError):
            VerificationReport(
                claim_id="X", parameters={}, empirical=0.5, bound=0.5,
                sigma=-1e-3, verdict=Verdict.PASS,
            )


class TestRoundTrip:
    def test_write_then_read_identity(self, tmp_path):
        path = tmp_path / "reports.jsonl"
        originals = sample_reports()
        report_io(originals, path)
        loaded = load_reports(path)
        assert loaded == originals

    def test_empty_list_gives_empty_file(self, tmp_path):
        path = tmp_path / "none.jsonl"
        report_io([], path)
        assert path.read_text() == ""
        assert load_reports(path) == []

    def test_one_record_per_line(self, tmp_path):
        path = tmp_path / "reports.jsonl"
        report_io(sample_reports(), path)
        lines = [l for l in path.read_text().splitlines() if l]
        assert len(lines) == 3
        for line in lines:
            record = json.loads(line)
            assert record["schema_version"] == SCHEMA_VERSION


class TestParseErrors:
    def test_malformed_json_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        report_io(sample_reports()[:1], path)
        with open(path, "a", encoding="utf-8") as handle:
            handle.write("{not json\n")
        with pytest.raises(ReportParseError, match="line 2"):
            load_reports(path)

    def test_non_object_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text("[1, 2, 3]\n")
        with pytest.raises(ReportParseError, match="line 1"):
            load_reports(path)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        report_io(sample_reports()[:1], path)
        record = json.loads(path.read_text())
        del record["bound"]
        path.write_text(json.dumps(record) + "\n")
        with pytest.raises(ReportParseError, match="line 1"):
            load_reports(path)

    def test_schema_version_mismatch(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        report_io(sample_reports()[:1], path)
        record = json.loads(path.read_text())
        record["schema_version"] = SCHEMA_VERSION + 1
        path.write_text(json.dumps(record) + "\n")
        with pytest.raises(ReportParseError, match="schema"):
            load_reports(path)

    def test_bad_verdict_value(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        report_io(sample_reports()[:1], path)
        record = json.loads(path.read_text())
        record["verdict"] = "MAYBE"
        path.write_text(json.dumps(record) + "\n")
        with pytest.raises(ReportParseError, match="line 1"):
            load_reports(path)

    def test_blank_lines_are_skipped(self, tmp_path):
        path = tmp_path / "gaps.jsonl"
        report_io(sample_reports()[:1], path)
        content = path.read_text()
        path.write_text("\n" + content + "\n\n")
        assert len(load_reports(path)) == 1
