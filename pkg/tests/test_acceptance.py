"""Acceptance gate: twelve numbered criteria, one pass/fail line each.

Every criterion is asserted exactly as stated, including its runtime
budget.  Criterion 7 demands that the below-half exceedance curve reach
within 0.05 of capacity by depth 20; the exact counts show that needs
depths far beyond the enumeration limit, so that test is expected to
fail.  The failure is genuine and documented; do not loosen it here.
"""

import math
import time
from fractions import Fraction

import numpy as np

from polarscale import (
    DualScaleValue,
    ProcessKind,
    drift_constant_check,
    e_n_x,
    e_n_x_deviation,
    fixed_point_y,
)
from polarscale.batch import leq_mask
from polarscale.harness import (
    Verdict,
    cdf_point,
    exact_enumerate_bec,
    mc_event_probability,
    verify_corollary1,
    verify_domination,
    verify_lemma1,
    verify_lemma3,
    verify_lemma4,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
)

SEED = 2024
X_GRID = [round(0.05 * i, 2) for i in range(1, 20)]


def announce(number: int, name: str, ok: bool, detail: str) -> None:
    status = "pass" if ok else "FAIL"
    print(f"criterion {number:02d} {name}: {status} ({detail})")


def test_criterion_01_fixed_point():
    start = time.perf_counter()
    y = fixed_point_y()
    elapsed = time.perf_counter() - start
    rhs = (
        y ** 0.5 / (2.0 * (2.0 ** 0.5 - 1.0))
        + y ** 0.25 / (4.0 * (2.0 ** 0.75 - 1.0))
        + y ** 0.125 / (4.0 * (2.0 ** 0.875 - 1.0))
    )
    residual = abs(y - rhs)
    ok = residual < 1e-12 and y <= 2.87 and elapsed < 1.0
    announce(1, "fixed-point", ok, f"y={y:.12f} residual={residual:.3g}")
    assert ok


def test_criterion_02_drift_constant():
    start = time.perf_counter()
    value = drift_constant_check(10 ** 4)
    elapsed = time.perf_counter() - start
    ok = value <= 0.925 + 1e-3 and elapsed < 30.0
    announce(2, "drift-constant", ok, f"max={value:.12f} in {elapsed:.2f}s")
    assert ok


def test_criterion_03_mean_sqrt_decay_exact():
    start = time.perf_counter()
    worst = 0.0
    for eps in (0.5, 0.1):
        reports = verify_lemma4(eps, list(range(21)))
        assert len(reports) == 21
        for report in reports:
            n = report.parameters["n"]
            assert report.bound == 0.5 * 0.925 ** n
            worst = max(worst, report.empirical - report.bound)
            assert report.verdict is Verdict.PASS
    elapsed = time.perf_counter() - start
    ok = worst <= 0.0 and elapsed < 120.0
    announce(3, "mean-sqrt-decay", ok, f"max excess={worst:.3g} in {elapsed:.2f}s")
    assert ok


def test_criterion_04_upper_process_tail_mc():
    start = time.perf_counter()
    report = verify_lemma1(1e-4, 1.0, 60, 100000, SEED)
    elapsed = time.perf_counter() - start
    assert report.bound == 1.0 - 2.0 ** 1.5 * 1e-2
    ok = (
        report.empirical >= report.bound - 3.0 * report.sigma
        and report.verdict is Verdict.PASS
        and elapsed < 60.0
    )
    announce(4, "upper-tail-mc", ok,
             f"empirical={report.empirical:.5f} bound={report.bound:.5f}")
    assert ok


def test_criterion_05_pathwise_domination():
    start = time.perf_counter()
    report = verify_domination(0.5, 200, 10 ** 6, SEED)
    elapsed = time.perf_counter() - start
    violations = report.parameters["violations"]
    ok = (
        violations == 0
        and report.empirical == 1.0
        and report.verdict is Verdict.PASS
        and elapsed < 120.0
    )
    announce(5, "pathwise-domination", ok,
             f"violations={violations}/1000000 in {elapsed:.1f}s")
    assert ok


def test_criterion_06_tail_threshold_exactness():
    start = time.perf_counter()
    for n in range(1, 61):
        for x in X_GRID:
            e = e_n_x(n, x).e
            target = Fraction(x) * (1 << n)
            tail_at_e = sum(math.comb(n, i) for i in range(e, n + 1))
            assert tail_at_e <= target <= tail_at_e + math.comb(n, e - 1), (n, x, e)
    drops = 0
    for x in X_GRID:
        devs = [e_n_x_deviation(n, x) for n in (100, 10 ** 4, 10 ** 6)]
        assert devs[0] >= devs[1] >= devs[2], (x, devs)
        drops += 1
    elapsed = time.perf_counter() - start
    ok = elapsed < 60.0
    announce(6, "tail-threshold", ok,
             f"60x19 sandwiches exact, {drops} deviation chains monotone")
    assert ok


def test_criterion_07_polarization_trends():
    start = time.perf_counter()
    reports = verify_theorem1(0.5, [0.4, 0.6], [12, 16, 20])
    elapsed = time.perf_counter() - start
    below, above = reports
    final = below.parameters["values"][-1]
    ok = (
        all(r.verdict is Verdict.PASS for r in reports)
        and elapsed < 180.0
    )
    announce(7, "polarization-trends", ok,
             f"final below-half value {final:.5f} vs target 0.5 +/- 0.05, "
             f"above-half {above.verdict.value}")
    assert ok


def test_criterion_08_rate_bracketing():
    start = time.perf_counter()
    (report,) = verify_theorem2(0.5, 0.3, [12, 16, 20, 22], part=1)
    elapsed = time.perf_counter() - start
    slack = report.parameters["slacks"][-1]
    assert report.parameters["tolerance"] <= 0.03 + slack
    ok = report.verdict is Verdict.PASS and elapsed < 600.0
    announce(8, "rate-bracketing", ok,
             f"easier={report.parameters['easier_curve'][-1]:.5f} "
             f"harder={report.parameters['harder_curve'][-1]:.5f} "
             f"tolerance={report.parameters['tolerance']:.5f}")
    assert ok


def test_criterion_09_subexponential_band_mc():
    start = time.perf_counter()
    reports = verify_lemma3(0.5, 0.95, [400], mode="mc", trials=100000, seed=SEED)
    elapsed = time.perf_counter() - start
    part_a = next(r for r in reports if r.parameters["part"] == "a")
    assert part_a.bound == 0.5 - (1.0 + 2.0 * math.sqrt(6.0)) * 0.95 ** 200
    ok = (
        part_a.empirical >= part_a.bound - 3.0 * part_a.sigma
        and part_a.verdict is Verdict.PASS
        and elapsed < 120.0
    )
    announce(9, "subexponential-band", ok,
             f"empirical={part_a.empirical:.5f} bound={part_a.bound:.6f}")
    assert ok


def test_criterion_10_decoder_vs_bound():
    start = time.perf_counter()
    report = verify_theorem3(0.5, 0.25, 4, 100000, SEED)
    elapsed = time.perf_counter() - start
    assert report.parameters["min_weight"] <= e_n_x(4, 0.25).e
    ok = (
        report.empirical >= report.bound - 3.0 * report.sigma
        and report.verdict is Verdict.PASS
        and elapsed < 60.0
    )
    announce(10, "decoder-vs-bound", ok,
             f"block_error={report.empirical:.5f} bound={report.bound:.3g} "
             f"min_weight={report.parameters['min_weight']}")
    assert ok


def test_criterion_11_selection_overlap_trend():
    start = time.perf_counter()
    report = verify_corollary1(0.25, 0.5, [8, 16])
    elapsed = time.perf_counter() - start
    overlaps = report.parameters["overlaps"]
    ok = (
        overlaps["16"] >= overlaps["8"] - 0.02
        and report.verdict is Verdict.PASS
        and elapsed < 60.0
    )
    announce(11, "selection-overlap", ok,
             f"overlap(8)={overlaps['8']:.5f} overlap(16)={overlaps['16']:.5f}")
    assert ok


def test_criterion_12_engine_cross_validation():
    start = time.perf_counter()
    en = exact_enumerate_bec(0.5, 16)
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for i in range(5):
        loglog = float(rng.uniform(3.0, 7.0))
        threshold = DualScaleValue.from_neg_log2(2.0 ** loglog)
        exact = cdf_point(en, threshold)
        p_hat, sigma = mc_event_probability(
            ProcessKind.BEC_EXACT,
            0.5,
            16,
            lambda arrays: leq_mask(arrays.regimes, arrays.payloads, threshold),
            100000,
            SEED + i,
        )
        assert sigma > 0.0, (loglog, p_hat)
        gap = abs(p_hat - exact) / sigma
        worst = max(worst, gap)
        assert gap <= 3.0, (loglog, exact, p_hat, sigma)
    elapsed = time.perf_counter() - start
    ok = elapsed < 120.0
    announce(12, "engine-cross-validation", ok,
             f"worst |mc-exact| = {worst:.2f} sigma over 5 thresholds")
    assert ok
