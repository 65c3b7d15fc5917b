"""Experiment engine: exact enumeration, Monte Carlo, verification, CLI."""

from .enumeration import Enumeration, cdf_point, exact_enumerate_bec
from .montecarlo import ProcessArrays, mc_event_probability
from .reports import (
    SCHEMA_VERSION,
    VerificationReport,
    Verdict,
    load_reports,
    report_io,
)
from .verify import (
    default_f,
    verify_corollary1,
    verify_corollary2,
    verify_domination,
    verify_drift_constant,
    verify_fixed_point,
    verify_lemma1,
    verify_lemma3,
    verify_lemma4,
    verify_lemma5,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
)

__all__ = [
    "Enumeration",
    "exact_enumerate_bec",
    "cdf_point",
    "ProcessArrays",
    "mc_event_probability",
    "SCHEMA_VERSION",
    "Verdict",
    "VerificationReport",
    "report_io",
    "load_reports",
    "default_f",
    "verify_theorem1",
    "verify_theorem2",
    "verify_theorem3",
    "verify_corollary1",
    "verify_corollary2",
    "verify_lemma1",
    "verify_lemma3",
    "verify_lemma4",
    "verify_lemma5",
    "verify_domination",
    "verify_fixed_point",
    "verify_drift_constant",
]
