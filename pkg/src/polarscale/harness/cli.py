"""Command line front end for the scaling laboratory.

Every experiment is reachable through a subcommand with fixed flag
names.  Defaults come from three layers: built-in values, then an
optional key=value config file (``--config``), then explicit flags,
with later layers winning.  ``verify`` exits 0 only when every report
verdict is PASS or VACUOUS.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from typing import Dict, List, Optional, Sequence

from ..codes import map_lower_bound, overlap_fraction, polar_select, rm_select, sc_simulate_bec
from ..errors import PolarScaleError
from ..numerics import DualScaleValue, Regime, q_inv
from ..scaling import e_n_x, scaling_fit
from . import verify as verify_ops
from .enumeration import cdf_point, exact_enumerate_bec
from .reports import VerificationReport, report_io

CLAIMS = (
    "theorem1",
    "theorem2-1",
    "theorem2-2",
    "theorem3",
    "corollary1",
    "corollary2",
    "lemma1",
    "lemma3",
    "lemma4",
    "lemma5",
    "domination",
    "fixed-point",
    "drift-constant",
)

# Built-in defaults per verify claim; a config file or explicit flags
# override them.  Common keys: trials, seed.
_CLAIM_DEFAULTS: Dict[str, Dict[str, object]] = {
    "theorem1": {"eps": 0.5, "betas": [0.4, 0.6], "ns": [12, 16, 20]},
    "theorem2-1": {"eps": 0.5, "rate": 0.3, "ns": [12, 16, 20, 22]},
    "theorem2-2": {"eps": 0.5, "rate": 0.3, "ns": [12, 16, 20, 22]},
    "theorem3": {"eps": 0.5, "rate": 0.25, "n": 4},
    "corollary1": {"eps": 0.25, "rate": 0.5, "ns": [8, 12, 16]},
    "corollary2": {"z0": 1e-4, "x": 0.5, "n": 60},
    "lemma1": {"z0": 1e-4, "beta": 1.0, "n": 60},
    "lemma3": {"eps": 0.5, "rho": 0.95, "ns": [400], "mode": "mc"},
    "lemma4": {"eps": 0.5, "ns": [0, 4, 8, 12, 16, 20]},
    "lemma5": {"e0": 0.999, "n": 50},
    "domination": {"eps": 0.5, "n": 200},
    "fixed-point": {},
    "drift-constant": {"grid_density": 10000},
}
_COMMON_DEFAULTS = {"trials": 100000, "seed": 2024}


def _int_list(text: str) -> List[int]:
    return [int(part) for part in text.split(",") if part.strip() != ""]


def _float_list(text: str) -> List[float]:
    return [float(part) for part in text.split(",") if part.strip() != ""]


def load_config(path: str) -> Dict[str, str]:
    """Read a key=value file; blank lines and # comments are skipped."""
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise PolarScaleError(f"config line {number}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONVERTERS = {
    "eps": float,
    "n": int,
    "rate": float,
    "trials": int,
    "seed": int,
    "threshold_loglog": float,
    "x": float,
    "rule": str,
    "ns": _int_list,
    "betas": _float_list,
    "z0": float,
    "beta": float,
    "rho": float,
    "e0": float,
    "mode": str,
    "grid_density": int,
}


def _resolve(args: argparse.Namespace, config: Dict[str, str], key: str, builtin=None):
    """Layer a parameter: explicit flag, then config file, then built-in."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return _CONVERTERS[key](config[key])
    return builtin


def _require(value, key: str):
    if value is None:
        raise PolarScaleError(f"missing required parameter --{key.replace('_', '-')}")
    return value


def _reliability_table(eps: float, n: int) -> Dict[int, float]:
    en = exact_enumerate_bec(eps, n)
    levels = en.neg_log2_leaves()
    return {i: float(levels[i]) for i in range(en.size)}


def _print(key: str, value) -> None:
    print(f"{key} = {value}")


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _cmd_enumerate(args, config) -> int:
    eps = _require(_resolve(args, config, "eps"), "eps")
    n = _require(_resolve(args, config, "n"), "n")
    en = exact_enumerate_bec(eps, n)
    levels = en.neg_log2_leaves()
    rows = (
        (i, int(i).bit_count(), f"{levels[i]:.17g}", Regime(int(en.regimes[i])).name)
        for i in range(en.size)
    )
    if args.out:
        _write_csv(args.out, ("id", "weight", "L", "regime"), rows)
        _print("rows", en.size)
        _print("out", args.out)
    else:
        print("id,weight,L,regime")
        for row in rows:
            print(",".join(str(cell) for cell in row))
    return 0


def _cmd_cdf(args, config) -> int:
    eps = _require(_resolve(args, config, "eps"), "eps")
    n = _require(_resolve(args, config, "n"), "n")
    loglog = _require(_resolve(args, config, "threshold_loglog"), "threshold-loglog")
    threshold = DualScaleValue.from_neg_log2(2.0 ** loglog)
    value = cdf_point(exact_enumerate_bec(eps, n), threshold)
    _print("F", f"{value:.17g}")
    return 0


def _cmd_enx(args, config) -> int:
    n = _require(_resolve(args, config, "n"), "n")
    x = _require(_resolve(args, config, "x"), "x")
    result = e_n_x(n, x)
    _print("e", result.e)
    _print("slack", f"{result.slack:.17g}")
    _print("gaussian", f"{result.gaussian:.17g}")
    return 0


def _cmd_select(args, config) -> int:
    eps = _require(_resolve(args, config, "eps"), "eps")
    n = _require(_resolve(args, config, "n"), "n")
    rate = _require(_resolve(args, config, "rate"), "rate")
    rule = _resolve(args, config, "rule", "polar")
    if rule == "polar":
        sel = polar_select(_reliability_table(eps, n), rate)
    elif rule == "rm":
        sel = rm_select(n, rate)
    else:
        raise PolarScaleError(f"rule must be 'polar' or 'rm', got {rule!r}")
    rows = [
        (i, sel.weights[i], f"{sel.reliabilities[i]:.17g}" if i in sel.reliabilities else "")
        for i in sorted(sel.indices)
    ]
    if args.out:
        _write_csv(args.out, ("id", "weight", "L"), rows)
        _print("rows", len(rows))
        _print("out", args.out)
    else:
        print("id,weight,L")
        for row in rows:
            print(",".join(str(cell) for cell in row))
    return 0


def _cmd_overlap(args, config) -> int:
    eps = _require(_resolve(args, config, "eps"), "eps")
    n = _require(_resolve(args, config, "n"), "n")
    rate = _require(_resolve(args, config, "rate"), "rate")
    fraction = overlap_fraction(
        polar_select(_reliability_table(eps, n), rate), rm_select(n, rate)
    )
    _print("overlap", f"{fraction:.17g}")
    return 0


def _cmd_map_bound(args, config) -> int:
    eps = _require(_resolve(args, config, "eps"), "eps")
    n = _require(_resolve(args, config, "n"), "n")
    rate = _require(_resolve(args, config, "rate"), "rate")
    sel = polar_select(_reliability_table(eps, n), rate)
    bound = map_lower_bound(sel, DualScaleValue.from_float(eps))
    _print("min_weight", sel.min_weight())
    _print("log_exponent", f"{bound.log_exponent:.17g}")
    _print("neg_log2", f"{bound.neg_log2:.17g}")
    if bound.value > 0.0:
        _print("value", f"{bound.value:.17g}")
    else:
        _print("value", "below the linear-domain floor")
    return 0


def _cmd_sc_sim(args, config) -> int:
    eps = _require(_resolve(args, config, "eps"), "eps")
    n = _require(_resolve(args, config, "n"), "n")
    rate = _require(_resolve(args, config, "rate"), "rate")
    trials = _resolve(args, config, "trials", _COMMON_DEFAULTS["trials"])
    seed = _resolve(args, config, "seed", _COMMON_DEFAULTS["seed"])
    sel = polar_select(_reliability_table(eps, n), rate)
    bound = sc_simulate_bec(sel, eps, trials, seed)
    _print("block_error", f"{bound.value:.17g}")
    _print("ci_halfwidth", f"{bound.ci_halfwidth:.17g}")
    _print("trials", trials)
    return 0


def _cmd_fit(args, config) -> int:
    eps = _require(_resolve(args, config, "eps"), "eps")
    rate = _require(_resolve(args, config, "rate"), "rate")
    ns = _require(_resolve(args, config, "ns"), "ns")
    ts = []
    for n in ns:
        en = exact_enumerate_bec(eps, n)
        levels = en.neg_log2_leaves()
        k = math.ceil(rate * en.size)
        kth = float(sorted(levels, reverse=True)[k - 1])
        if kth <= 0.0:
            raise PolarScaleError(
                f"k-th reliability at n={n} is not positive; nothing to fit"
            )
        ts.append(math.log2(kth))
    fit = scaling_fit(list(zip(ns, ts)))
    _print("a", f"{fit.a:.17g}")
    _print("b", f"{fit.b:.17g}")
    _print("rms_residual", f"{fit.rms_residual:.17g}")
    _print("reference_a", 0.5)
    _print("reference_b", f"{q_inv(rate / (1.0 - eps)) / 2.0:.17g}")
    return 0


def _run_verify(claim: str, args, config) -> List[VerificationReport]:
    defaults = _CLAIM_DEFAULTS[claim]

    def get(key: str):
        builtin = defaults.get(key, _COMMON_DEFAULTS.get(key))
        return _require(_resolve(args, config, key, builtin), key)

    if claim == "theorem1":
        return verify_ops.verify_theorem1(get("eps"), get("betas"), get("ns"))
    if claim in ("theorem2-1", "theorem2-2"):
        part = 1 if claim.endswith("1") else 2
        return verify_ops.verify_theorem2(get("eps"), get("rate"), get("ns"), part=part)
    if claim == "theorem3":
        return [
            verify_ops.verify_theorem3(
                get("eps"), get("rate"), get("n"), get("trials"), get("seed")
            )
        ]
    if claim == "corollary1":
        return [verify_ops.verify_corollary1(get("eps"), get("rate"), get("ns"))]
    if claim == "corollary2":
        return [
            verify_ops.verify_corollary2(
                get("z0"), get("x"), get("n"), get("trials"), get("seed")
            )
        ]
    if claim == "lemma1":
        return [
            verify_ops.verify_lemma1(
                get("z0"), get("beta"), get("n"), get("trials"), get("seed")
            )
        ]
    if claim == "lemma3":
        return verify_ops.verify_lemma3(
            get("eps"), get("rho"), get("ns"), get("mode"), get("trials"), get("seed")
        )
    if claim == "lemma4":
        return verify_ops.verify_lemma4(get("eps"), get("ns"))
    if claim == "lemma5":
        return [
            verify_ops.verify_lemma5(get("e0"), get("n"), get("trials"), get("seed"))
        ]
    if claim == "domination":
        return [
            verify_ops.verify_domination(get("eps"), get("n"), get("trials"), get("seed"))
        ]
    if claim == "fixed-point":
        return [verify_ops.verify_fixed_point()]
    if claim == "drift-constant":
        return [verify_ops.verify_drift_constant(get("grid_density"))]
    raise PolarScaleError(f"unknown claim {claim!r}")


_SCALAR_PARAM_KEYS = (
    "part", "eps", "rate", "x", "z0", "beta", "rho", "e0", "n", "mode",
    "trials", "grid_density", "min_weight", "count_threshold", "violations",
)


def _report_line(report: VerificationReport) -> str:
    pieces = [f"{report.claim_id:<12} {report.verdict.value:<7}"]
    pieces.append(f"empirical={report.empirical:.6g}")
    pieces.append(f"bound={report.bound:.6g}")
    if report.sigma is not None:
        pieces.append(f"sigma={report.sigma:.3g}")
    for key in _SCALAR_PARAM_KEYS:
        if key in report.parameters and report.parameters[key] is not None:
            pieces.append(f"{key}={report.parameters[key]}")
    return " ".join(pieces)


def _cmd_verify(args, config) -> int:
    reports = _run_verify(args.claim, args, config)
    for report in reports:
        print(_report_line(report))
    if args.out:
        report_io(reports, args.out)
        _print("out", args.out)
    return 0 if all(r.verdict.acceptable for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarscale",
        description="Polarization process experiments, bounds, and claim verification.",
    )
    parser.add_argument("--config", help="key=value file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, *flags: str, out: bool = False):
        p = sub.add_parser(name)
        for flag in flags:
            key = flag.replace("-", "_")
            p.add_argument(f"--{flag}", type=_CONVERTERS[key], dest=key)
        if out:
            p.add_argument("--out")
        p.set_defaults(func=func)
        return p

    add("enumerate", _cmd_enumerate, "eps", "n", out=True)
    add("cdf", _cmd_cdf, "eps", "n", "threshold-loglog")
    add("enx", _cmd_enx, "n", "x")
    add("select", _cmd_select, "eps", "n", "rate", "rule", out=True)
    add("overlap", _cmd_overlap, "eps", "n", "rate")
    add("map-bound", _cmd_map_bound, "eps", "n", "rate")
    add("sc-sim", _cmd_sc_sim, "eps", "n", "rate", "trials", "seed")
    verify_p = add(
        "verify",
        _cmd_verify,
        "eps", "n", "ns", "rate", "x", "z0", "beta", "betas", "rho", "e0",
        "mode", "grid-density", "trials", "seed",
        out=True,
    )
    verify_p.add_argument("claim", choices=CLAIMS)
    add("fit", _cmd_fit, "eps", "rate", "ns")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else {}
        return args.func(args, config)
    except PolarScaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
