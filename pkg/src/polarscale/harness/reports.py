"""Verification reports and their newline-delimited persistence format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum, unique
from pathlib import Path
from typing import Any, List, Mapping, Optional, Sequence, Union

from ..errors import DomainError, ReportParseError

__all__ = [
    "SCHEMA_VERSION",
    "Verdict",
    "VerificationReport",
    "utc_timestamp",
    "report_io",
    "load_reports",
]

SCHEMA_VERSION = 1

_FIELDS = (
    "schema_version",
    "claim_id",
    "parameters",
    "empirical",
    "bound",
    "sigma",
    "verdict",
    "seed",
    "timestamp",
)


@unique
class Verdict(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    VACUOUS = "VACUOUS"

    @property
    def acceptable(self) -> bool:
        return self is not Verdict.FAIL


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class VerificationReport:
    """One claim checked at one parameter point.

    ``empirical`` is the measured or exactly computed quantity,
    ``bound`` the closed-form value it is compared against, and
    ``sigma`` the standard error when the comparison is statistical
    (None for exact checks).
    """

    claim_id: str
    parameters: Mapping[str, Any]
    empirical: float
    bound: float
    verdict: Verdict
    sigma: Optional[float] = None
    seed: Optional[int] = None
    timestamp: str = field(default_factory=utc_timestamp)

    def __post_init__(self) -> None:
        if not self.claim_id:
            raise DomainError("claim_id must be non-empty")
        if math.isnan(self.empirical) or math.isnan(self.bound):
            raise DomainError("empirical and bound must not be NaN")
        if self.sigma is not None and self.sigma < 0.0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma!r}")

    def to_record(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "claim_id": self.claim_id,
            "parameters": dict(self.parameters),
            "empirical": self.empirical,
            "bound": self.bound,
            "sigma": self.sigma,
            "verdict": self.verdict.value,
            "seed": self.seed,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "VerificationReport":
        return cls(
            claim_id=record["claim_id"],
            parameters=record["parameters"],
            empirical=record["empirical"],
            bound=record["bound"],
            verdict=Verdict(record["verdict"]),
            sigma=record["sigma"],
            seed=record["seed"],
            timestamp=record["timestamp"],
        )


def report_io(reports: Sequence[VerificationReport], path: Union[str, Path]) -> None:
    """Write reports as one JSON record per line."""
    lines = [json.dumps(report.to_record(), sort_keys=True) for report in reports]
    text = "".join(line + "\n" for line in lines)
    Path(path).write_text(text, encoding="utf-8")


def load_reports(path: Union[str, Path]) -> List[VerificationReport]:
    """Read reports back; malformed input names the offending line."""
    reports: List[VerificationReport] = []
    text = Path(path).read_text(encoding="utf-8")
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ReportParseError(f"line {number}: invalid JSON ({exc.msg})") from None
        if not isinstance(record, dict):
            raise ReportParseError(f"line {number}: expected an object")
        missing = [name for name in _FIELDS if name not in record]
        if missing:
            raise ReportParseError(
                f"line {number}: missing fields {', '.join(missing)}"
            )
        if record["schema_version"] != SCHEMA_VERSION:
            raise ReportParseError(
                f"line {number}: unsupported schema version {record['schema_version']!r}"
            )
        try:
            reports.append(VerificationReport.from_record(record))
        except (ValueError, TypeError, KeyError) as exc:
            raise ReportParseError(f"line {number}: {exc}") from None
    return reports
