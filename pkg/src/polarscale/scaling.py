"""Finite-length scaling function and closed-form bound constants.

The central object is the integer threshold ``e_n_x``: the unique e such
that the upper binomial tail starting at e is at most ``2**n * x`` while
the tail starting at e - 1 still covers it.  For a balanced random walk
of n fair bits, e is the smallest count of ones whose exceedance
probability drops to x or below.  The Gaussian companion value
``n/2 + sqrt(n) * q_inv(x) / 2`` tracks e to within o(sqrt(n)), and
``e_n_x_deviation`` measures that gap in units of sqrt(n).

The rest of the module evaluates the closed-form right-hand sides used by
the verification harness (``bound_value``), locates the contraction fixed
point ``fixed_point_y``, and certifies the drift constant 1.85/2 that
controls the decay of E[sqrt(Z(1-Z))] under a random polarization step
(``drift_constant_check``).  ``scaling_fit`` recovers the (a, b)
coefficients of the a*n + b*sqrt(n) scaling law from empirical threshold
data.

All functions here are pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum, unique
from fractions import Fraction
from typing import Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, InternalCheckError
from .numerics import _log2_comb, log2_binom_tail, q_inv

__all__ = [
    "ALPHA_1",
    "ALPHA_2",
    "DRIFT_CONSTANT",
    "RHO_LOWER_EDGE",
    "FIXED_POINT_CAP",
    "EnxResult",
    "e_n_x",
    "e_n_x_deviation",
    "fixed_point_y",
    "BoundClaim",
    "BoundSpec",
    "bound_value",
    "drift_maximand",
    "drift_constant_check",
    "ScalingFit",
    "scaling_fit",
]

# Constants shared by several bounds.  ALPHA_1 and ALPHA_2 are the two
# probability-defect constants of the two-sided polarization speed bound;
# DRIFT_CONSTANT is the certified one-step contraction factor for
# E[sqrt(Z(1-Z))]; RHO_LOWER_EDGE is the smallest decay rate for which
# the two-sided bound's derivation stays valid (open edge).
ALPHA_1 = 1.0 + 2.0 * math.sqrt(6.0)
ALPHA_2 = 5.0
DRIFT_CONSTANT = 1.85 / 2.0
RHO_LOWER_EDGE = DRIFT_CONSTANT ** (2.0 / 3.0)
FIXED_POINT_CAP = 2.87

# Largest n for which the threshold search runs on exact big integers.
# Beyond this the search compares floating log2 tail masses instead.
_EXACT_ENX_N = 1024


@dataclass(frozen=True)
class EnxResult:
    """Solution of the tail-threshold equation at block exponent n, mass x.

    ``e`` is the threshold itself.  ``slack`` is the exact one-term
    correction C(n, e-1) * 2**-n separating the two defining
    inequalities; any probability guaranteed "x minus a vanishing term"
    by the scaling law is guaranteed at least ``x - slack`` at finite n.
    ``gaussian`` is the normal-approximation companion value.
    """

    n: int
    x: float
    e: int
    slack: float
    gaussian: float


def _exact_upper_tail(n: int, k: int) -> int:
    # Sum of C(n, i) for i in [k, n], exact.  k may be n + 1 (empty sum).
    if k <= 0:
        return 1 << n
    if k > n:
        return 0
    term = math.comb(n, k)
    total = term
    for i in range(k, n):
        term = term * (n - i) // (i + 1)
        total += term
    return total


def _check_enx_domain(n: int, x: float) -> None:
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not (isinstance(x, (int, float)) and 0.0 < x < 1.0):
        raise DomainError(f"x must lie in the open interval (0,1), got {x!r}")


def e_n_x(n: int, x: float) -> EnxResult:
    """Smallest integer e whose upper binomial tail is at most 2**n * x.

    Equivalently e satisfies the two-sided sandwich

        sum_{i=e}^{n} C(n,i)  <=  2**n * x  <=  sum_{i=e-1}^{n} C(n,i),

    with e in [1, n + 1].  For n up to 1024 the search compares exact big
    integers against the exact binary rational 2**n * x, so the sandwich
    holds verbatim.  For larger n the comparison happens between
    ``log2_binom_tail(n, k)`` and ``n + log2(x)``, accurate to the
    documented tolerance of the tail evaluator.

    ``slack`` is C(n, e-1) * 2**-n and ``gaussian`` is
    n/2 + sqrt(n) * q_inv(x) / 2.
    """
    _check_enx_domain(n, x)
    if n <= _EXACT_ENX_N:
        # x, a binary rational, embeds exactly in Fraction; the target
        # 2**n * x is therefore exact and every comparison is decisive.
        target = Fraction(x) * (1 << n)
        lo, hi = 1, n + 1
        while lo < hi:
            mid = (lo + hi) // 2
            if _exact_upper_tail(n, mid) <= target:
                hi = mid
            else:
                lo = mid + 1
        e = lo
        slack = float(Fraction(math.comb(n, e - 1), 1 << n))
    else:
        target_log = n + math.log2(x)
        lo, hi = 1, n + 1
        while lo < hi:
            mid = (lo + hi) // 2
            if log2_binom_tail(n, mid) <= target_log:
                hi = mid
            else:
                lo = mid + 1
        e = lo
        slack = 2.0 ** (_log2_comb(n, e - 1) - n)
    gaussian = 0.5 * n + math.sqrt(n) * q_inv(x) / 2.0
    return EnxResult(n=n, x=float(x), e=e, slack=slack, gaussian=gaussian)


def e_n_x_deviation(n: int, x: float) -> float:
    """Distance |e - gaussian| in units of sqrt(n); non-negative."""
    result = e_n_x(n, x)
    return abs(result.e - result.gaussian) / math.sqrt(n)


def _fixed_point_rhs(y: float) -> float:
    return (
        y ** 0.5 / (2.0 * (2.0 ** 0.5 - 1.0))
        + y ** 0.25 / (4.0 * (2.0 ** 0.75 - 1.0))
        + y ** 0.125 / (4.0 * (2.0 ** 0.875 - 1.0))
    )


def fixed_point_y() -> float:
    """Unique solution y > 1 of y = RHS(y) for the three-term map above.

    RHS(1) > 1 and RHS(4) < 4, and RHS grows sublinearly (each term is a
    fractional power), so exactly one crossing sits in (1, 4).  Bisection
    narrows the bracket to machine resolution.  The residual must fall
    below 1e-12 and the root must not exceed FIXED_POINT_CAP; either
    failure indicates a broken evaluator rather than a bad input, hence
    an internal error.
    """
    lo, hi = 1.0, 4.0
    g_lo = _fixed_point_rhs(lo) - lo
    g_hi = _fixed_point_rhs(hi) - hi
    if not (g_lo > 0.0 > g_hi):
        raise InternalCheckError("fixed point bracket [1, 4] lost its sign change")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _fixed_point_rhs(mid) - mid > 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    residual = abs(_fixed_point_rhs(root) - root)
    if not residual < 1e-12:
        raise InternalCheckError(
            f"fixed point residual {residual:.3e} did not reach 1e-12"
        )
    if not 1.0 < root <= FIXED_POINT_CAP:
        raise InternalCheckError(
            f"fixed point {root!r} escaped the expected range (1, {FIXED_POINT_CAP}]"
        )
    return root


@unique
class BoundClaim(Enum):
    """Closed-form lower bounds evaluated by :func:`bound_value`."""

    LEMMA1 = "lemma1"
    COROLLARY2 = "corollary2"
    LEMMA3A = "lemma3a"
    LEMMA3B = "lemma3b"
    LEMMA4 = "lemma4"
    LEMMA5 = "lemma5"


@dataclass(frozen=True)
class BoundSpec:
    """A named bound together with the parameter point it is evaluated at.

    ``value`` stays None until evaluated; :meth:`evaluated` returns a copy
    with the computed right-hand side filled in.
    """

    claim_id: BoundClaim
    parameters: Mapping[str, float]
    value: Optional[float] = None

    def evaluated(self) -> "BoundSpec":
        return replace(self, value=bound_value(self))


def _require(spec: BoundSpec, name: str) -> float:
    try:
        raw = spec.parameters[name]
    except KeyError:
        raise DomainError(
            f"missing parameter {name!r} for {spec.claim_id.name}"
        ) from None
    value = float(raw)
    if math.isnan(value):
        raise DomainError(f"parameter {name!r} is NaN")
    return value


def _require_integer(spec: BoundSpec, name: str, minimum: int) -> int:
    value = _require(spec, name)
    if value != int(value) or value < minimum:
        raise DomainError(
            f"parameter {name!r} must be an integer >= {minimum}, got {value!r}"
        )
    return int(value)


def _require_in(spec: BoundSpec, name: str, lo: float, hi: float,
                *, closed: bool = False) -> float:
    value = _require(spec, name)
    inside = (lo <= value <= hi) if closed else (lo < value < hi)
    if not inside:
        bracket = "[{}, {}]" if closed else "({}, {})"
        raise DomainError(
            f"parameter {name!r} must lie in {bracket.format(lo, hi)}, got {value!r}"
        )
    return value


def bound_value(spec: BoundSpec) -> float:
    """Evaluate the right-hand side of the named claim at ``spec.parameters``.

    Expected parameters by claim:

    - LEMMA1:     z0 in (0,1), beta (real)     -> 1 - 2**(1 + beta/2) * sqrt(z0)
    - COROLLARY2: z0 in (0,1), x in (0,1), n   -> x - 2*sqrt(2)*sqrt(z0) - slack(n, x)
    - LEMMA3A:    I in [0,1], rho, n           -> I - (1 + 2*sqrt(6)) * rho**(n/2)
    - LEMMA3B:    I in [0,1], rho, n           -> 1 - I - 5 * rho**n
    - LEMMA4:     n                            -> 0.5 * (1.85/2)**n
    - LEMMA5:     e0 in [0,1]                  -> 1 - 2*sqrt(2)*sqrt(1 - e0**2)

    For LEMMA3A/B the decay rate rho must lie in the open interval
    (RHO_LOWER_EDGE, 1).  Results may be negative (a vacuous bound) and
    are returned unclamped.
    """
    claim = spec.claim_id
    if claim is BoundClaim.LEMMA1:
        z0 = _require_in(spec, "z0", 0.0, 1.0)
        beta = _require(spec, "beta")
        return 1.0 - 2.0 ** (1.0 + beta / 2.0) * math.sqrt(z0)
    if claim is BoundClaim.COROLLARY2:
        z0 = _require_in(spec, "z0", 0.0, 1.0)
        x = _require_in(spec, "x", 0.0, 1.0)
        n = _require_integer(spec, "n", 1)
        slack = e_n_x(n, x).slack
        return x - 2.0 * math.sqrt(2.0) * math.sqrt(z0) - slack
    if claim in (BoundClaim.LEMMA3A, BoundClaim.LEMMA3B):
        capacity = _require_in(spec, "I", 0.0, 1.0, closed=True)
        rho = _require_in(spec, "rho", RHO_LOWER_EDGE, 1.0)
        n = _require_integer(spec, "n", 0)
        if claim is BoundClaim.LEMMA3A:
            return capacity - ALPHA_1 * rho ** (n / 2.0)
        return 1.0 - capacity - ALPHA_2 * rho ** n
    if claim is BoundClaim.LEMMA4:
        n = _require_integer(spec, "n", 0)
        return 0.5 * DRIFT_CONSTANT ** n
    if claim is BoundClaim.LEMMA5:
        e0 = _require_in(spec, "e0", 0.0, 1.0, closed=True)
        return 1.0 - 2.0 * math.sqrt(2.0) * math.sqrt(1.0 - e0 * e0)
    raise DomainError(f"unknown claim {claim!r}")


def drift_maximand(z: float, x: float) -> float:
    """The two-term average whose constrained maximum is DRIFT_CONSTANT.

    One polarization step maps sqrt(Z(1-Z)) to the average of the plus
    and minus branches; normalizing by the current value gives

        0.5 * ( sqrt(x(1-x) / (z(1-z))) + sqrt(z(1+z)) )

    where x is the minus-branch output, constrained to the achievable
    band [z*sqrt(2-z^2), z*(2-z)].  This helper evaluates the expression
    at any (z, x) without enforcing the band.
    """
    if not 0.0 < z < 1.0:
        raise DomainError(f"z must lie in (0,1), got {z!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0,1], got {x!r}")
    return 0.5 * (
        math.sqrt(x * (1.0 - x) / (z * (1.0 - z))) + math.sqrt(z * (1.0 + z))
    )


def _drift_best_x(z: float) -> float:
    # x(1-x) is concave with peak at 1/2, so the inner maximum over the
    # band [z*sqrt(2-z^2), z*(2-z)] is 1/2 clamped into the band.
    lo = z * math.sqrt(2.0 - z * z)
    hi = z * (2.0 - z)
    return min(max(0.5, lo), hi)


def drift_constant_check(grid_density: int) -> float:
    """Maximize the one-step contraction ratio; certify it is <= 0.925 + 1e-3.

    Scans z over a uniform open grid of the requested density with the
    inner maximization over x done in closed form, then refines around
    the best grid point by repeated local re-gridding.  Raises an
    internal error if the certified ceiling is breached, since that
    would mean the evaluator (not the caller) is wrong.
    """
    if grid_density < 1000:
        raise DomainError(
            f"grid_density must be at least 1000, got {grid_density!r}"
        )
    zs = np.linspace(0.0, 1.0, grid_density + 2)[1:-1]
    best_z = 0.5
    best = -math.inf
    for z in zs:
        value = drift_maximand(z, _drift_best_x(z))
        if value > best:
            best = value
            best_z = float(z)
    # Local refinement: shrink a bracket of two grid steps around the
    # best point by a factor of ten per round.
    half_width = 1.0 / (grid_density + 1)
    for _ in range(6):
        lo = max(best_z - half_width, 1e-12)
        hi = min(best_z + half_width, 1.0 - 1e-12)
        for z in np.linspace(lo, hi, 41):
            value = drift_maximand(float(z), _drift_best_x(float(z)))
            if value > best:
                best = value
                best_z = float(z)
        half_width /= 10.0
    if not best <= DRIFT_CONSTANT + 1e-3:
        raise InternalCheckError(
            f"drift ratio maximum {best!r} exceeded {DRIFT_CONSTANT} + 1e-3"
        )
    return best


class ScalingFit(NamedTuple):
    a: float
    b: float
    rms_residual: float


def scaling_fit(points: Sequence[Tuple[int, float]]) -> ScalingFit:
    """Least-squares fit of threshold data to a*n + b*sqrt(n).

    ``points`` holds (n, loglog_threshold) pairs; at least three distinct
    n values are required for the two-parameter model to be testable.
    Returns the coefficients and the root-mean-square residual.
    """
    if len({int(n) for n, _ in points}) < 3:
        raise DomainError("scaling_fit needs at least 3 distinct n values")
    ns = np.array([float(n) for n, _ in points])
    ys = np.array([float(t) for _, t in points])
    if np.any(ns <= 0.0):
        raise DomainError("scaling_fit needs positive n values")
    design = np.column_stack([ns, np.sqrt(ns)])
    coef, _, rank, _ = np.linalg.lstsq(design, ys, rcond=None)
    if rank < 2:
        raise DomainError("degenerate design matrix in scaling_fit")
    residuals = design @ coef - ys
    rms = float(math.sqrt(float(np.mean(residuals * residuals))))
    return ScalingFit(a=float(coef[0]), b=float(coef[1]), rms_residual=rms)
