"""Dual-scale probability arithmetic for polarization recursions.

A Bhattacharyya-style reliability parameter ``z`` of a synthetic channel lives
in [0, 1] but polarizes doubly exponentially fast: after ``n`` splitting steps
typical values look like ``2**(-2**(n/2))`` or ``1 - 2**(-2**(n/2))``, far
outside what a raw float can hold.  ``DualScaleValue`` therefore stores ``z``
in one of three regimes split at the crossover ``tau = 2**-20``:

==========  =====================  =========================================
regime      payload                represented value
==========  =====================  =========================================
``LO``      ``L = -log2(z)``       ``z = 2**-L``           (z < tau)
``MID``     ``z`` itself           ``z``                   (tau <= z <= 1-tau)
``HI``      ``M = -log2(1 - z)``   ``z = 1 - 2**-M``       (z > 1-tau)
==========  =====================  =========================================

Representations are canonical (the constructors pick the regime from the
value), so equality and ordering are exact payload comparisons.  Exact 0 and 1
are the infinite-payload points of ``LO`` and ``HI``.

The three one-step transforms of the splitting recursion are

* ``PLUS``:          z -> z**2                 (exact for every B-MS channel),
* ``MINUS_UPPER``:   z -> 2z - z**2            (upper edge; exact for the BEC),
* ``MINUS_LOWER``:   z -> z * sqrt(2 - z**2)   (lower edge of the minus branch),

and each is implemented per regime so that no intermediate quantity is ever
formed by cancellation: near 1 the complement ``1 - z`` is propagated through
the algebraic identities ``1 - (2z - z**2) = (1-z)**2``, ``1 - z**2 =
(1-z)(2-(1-z))`` and ``1 - z*sqrt(2-z**2) = u / (1 + sqrt(1-u))`` with
``u = ((1-z)(2-(1-z)))**2``; near 0 the logarithmic payload moves by
``log2(2 - z)``, evaluated as ``1 + log1p(-z/2)/ln 2`` so that arguments below
``2**-53`` go through the small-argument series of ``log1p`` instead of the
rounded literal ``2 - z``.

The module also carries the scalar special functions the rest of the package
needs: the Gaussian upper-tail ``q_tail`` and its inverse ``q_inv`` (rational
approximation polished by Newton steps against ``q_tail``), and binomial tail
masses in the log2 domain (``log2_binom_tail``), exact over Python integers up
to ``n = 1024`` and accumulated term-by-term from the largest element beyond.

Everything here is a pure function of its arguments; values are frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum

from .errors import DomainError

__all__ = [
    "CROSSOVER_EXP",
    "CROSSOVER_TAU",
    "Regime",
    "BranchRule",
    "DualScaleValue",
    "LogExponent",
    "bhatt_branch",
    "q_tail",
    "q_inv",
    "log2_binom_tail",
]

LN2 = math.log(2.0)

#: Regime crossover: values with z < 2**-CROSSOVER_EXP live in LO, values with
#: 1 - z < 2**-CROSSOVER_EXP live in HI.
CROSSOVER_EXP = 20.0
CROSSOVER_TAU = 2.0**-CROSSOVER_EXP


class Regime(IntEnum):
    """Storage regime of a :class:`DualScaleValue`; ordered by value."""

    LO = 0
    MID = 1
    HI = 2


class BranchRule(Enum):
    """One-step reliability transforms of the channel splitting recursion."""

    PLUS = "plus"
    MINUS_UPPER = "minus_upper"
    MINUS_LOWER = "minus_lower"


# ---------------------------------------------------------------------------
# scalar regime kernels
#
# These operate on raw (regime:int, payload:float) pairs so that tree walkers
# can avoid object construction in hot loops; DualScaleValue wraps them.
# The integer regime codes are the Regime enum values.

_LO, _MID, _HI = int(Regime.LO), int(Regime.MID), int(Regime.HI)


def _exp_payload(x: float) -> float:
    # Regime changes branch on one rounded comparison but compute the new
    # payload through a second rounding, which can land a whisker on the wrong
    # side of the crossover.  Pin such hairline results to the boundary.
    return x if x >= CROSSOVER_EXP else CROSSOVER_EXP


def _mid_payload(z: float) -> float:
    if z < CROSSOVER_TAU:
        return CROSSOVER_TAU
    if z > 1.0 - CROSSOVER_TAU:
        return 1.0 - CROSSOVER_TAU
    return z


def _plus_kernel(r: int, p: float) -> tuple[int, float]:
    if r == _LO:
        return _LO, 2.0 * p
    if r == _MID:
        v = p * p
        if v < CROSSOVER_TAU:
            return _LO, _exp_payload(-2.0 * math.log2(p))
        return _MID, v
    # HI: 1 - z**2 = m*(2 - m) with m = 1 - z, so M' = M - log2(2 - m)
    m = 2.0**-p
    mp = p - 1.0 - math.log1p(-0.5 * m) / LN2
    if mp < CROSSOVER_EXP:
        return _MID, _mid_payload(1.0 - 2.0**-mp)
    return _HI, mp


def _minus_upper_kernel(r: int, p: float) -> tuple[int, float]:
    if r == _LO:
        # z(2 - z): L' = L - log2(2 - z), stable for arbitrarily small z
        z = 2.0**-p
        lp = p - 1.0 - math.log1p(-0.5 * z) / LN2
        if lp < CROSSOVER_EXP:
            return _MID, _mid_payload(2.0**-lp)
        return _LO, lp
    if r == _MID:
        z = p
        if z < 0.5:
            return _MID, z * (2.0 - z)
        m = 1.0 - z  # exact for z >= 0.5
        m2 = m * m
        if m2 < CROSSOVER_TAU:
            return _HI, _exp_payload(-2.0 * math.log2(m))
        return _MID, 1.0 - m2
    # HI: complement squares exactly
    return _HI, 2.0 * p


def _minus_lower_kernel(r: int, p: float) -> tuple[int, float]:
    if r == _LO:
        # z*sqrt(2 - z**2): L' = L - log2(2 - z**2)/2
        z2 = 4.0**-p
        lp = p - 0.5 - 0.5 * math.log1p(-0.5 * z2) / LN2
        if lp < CROSSOVER_EXP:
            return _MID, _mid_payload(2.0**-lp)
        return _LO, lp
    if r == _MID:
        z = p
        if z < 0.5:
            return _MID, z * math.sqrt(2.0 - z * z)
        m = 1.0 - z
        u = m * (2.0 - m)
        u *= u  # u = (1 - z**2)**2, and 1 - out = u/(1 + sqrt(1-u))
        rr = u / (1.0 + math.sqrt(1.0 - u))
        if rr < CROSSOVER_TAU:
            return _HI, _exp_payload(-math.log2(rr))
        return _MID, 1.0 - rr
    # HI: M' = -log2(u) + log2(1 + sqrt(1-u)) without materializing u when
    # it underflows: -log2(u) = 2*(M - log2(2 - m)).
    m = 2.0**-p
    log2_2m = 1.0 + math.log1p(-0.5 * m) / LN2
    u = m * (2.0 - m)
    u *= u
    rr = u / (1.0 + math.sqrt(1.0 - u))
    return _HI, 2.0 * (p - log2_2m) + 1.0 + math.log1p(-0.5 * rr) / LN2


_KERNELS = {
    BranchRule.PLUS: _plus_kernel,
    BranchRule.MINUS_UPPER: _minus_upper_kernel,
    BranchRule.MINUS_LOWER: _minus_lower_kernel,
}


def _canonical_from_float(z: float) -> tuple[int, float]:
    if math.isnan(z) or z < 0.0 or z > 1.0:
        raise DomainError(f"probability value out of [0, 1]: {z!r}")
    if z == 0.0:
        return _LO, math.inf
    if z == 1.0:
        return _HI, math.inf
    if z < CROSSOVER_TAU:
        return _LO, _exp_payload(-math.log2(z))
    if z > 1.0 - CROSSOVER_TAU:
        # the subtraction is exact for z >= 0.5
        return _HI, _exp_payload(-math.log2(1.0 - z))
    return _MID, z


@dataclass(frozen=True, slots=True)
class DualScaleValue:
    """A probability in [0, 1] stored in the regime that resolves it best."""

    regime: Regime
    payload: float

    def __post_init__(self) -> None:
        r, p = self.regime, self.payload
        if math.isnan(p):
            raise DomainError("payload must not be NaN")
        if r == Regime.MID:
            if not (CROSSOVER_TAU <= p <= 1.0 - CROSSOVER_TAU):
                raise DomainError(f"MID payload outside [tau, 1-tau]: {p!r}")
        elif p < CROSSOVER_EXP:
            raise DomainError(f"{r.name} payload below crossover exponent: {p!r}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_float(cls, z: float) -> "DualScaleValue":
        r, p = _canonical_from_float(float(z))
        return cls(Regime(r), p)

    @classmethod
    def from_neg_log2(cls, neg_log2: float) -> "DualScaleValue":
        """Value ``2**-neg_log2``; requires ``neg_log2 >= 0``."""
        if math.isnan(neg_log2) or neg_log2 < 0.0:
            raise DomainError(f"-log2(z) must be >= 0, got {neg_log2!r}")
        if neg_log2 > CROSSOVER_EXP:
            return cls(Regime.LO, neg_log2)
        # representable as a float without drama
        z = 2.0**-neg_log2
        if z > 1.0 - CROSSOVER_TAU:
            comp = -math.expm1(-neg_log2 * LN2)  # 1 - 2**-L without cancellation
            if comp == 0.0:
                return cls(Regime.HI, math.inf)
            return cls(Regime.HI, _exp_payload(-math.log2(comp)))
        return cls(Regime.MID, _mid_payload(z))

    @classmethod
    def from_neg_log2_complement(cls, neg_log2_c: float) -> "DualScaleValue":
        """Value ``1 - 2**-neg_log2_c``; requires ``neg_log2_c >= 0``."""
        if math.isnan(neg_log2_c) or neg_log2_c < 0.0:
            raise DomainError(f"-log2(1-z) must be >= 0, got {neg_log2_c!r}")
        if neg_log2_c > CROSSOVER_EXP:
            return cls(Regime.HI, neg_log2_c)
        z = 1.0 - 2.0**-neg_log2_c
        if z < CROSSOVER_TAU:
            zc = -math.expm1(-neg_log2_c * LN2)
            if zc == 0.0:
                return cls(Regime.LO, math.inf)
            return cls(Regime.LO, _exp_payload(-math.log2(zc)))
        return cls(Regime.MID, _mid_payload(z))

    # -- views -------------------------------------------------------------

    def to_float(self) -> float:
        """Nearest float; loses sub-``tau`` detail near 0 and 1 by design."""
        if self.regime == Regime.LO:
            return 2.0**-self.payload
        if self.regime == Regime.HI:
            return 1.0 - 2.0**-self.payload
        return self.payload

    def neg_log2(self) -> float:
        """``-log2(z)``, evaluated stably in every regime."""
        if self.regime == Regime.LO:
            return self.payload
        if self.regime == Regime.MID:
            return -math.log2(self.payload)
        m = 2.0**-self.payload
        return -math.log1p(-m) / LN2

    def neg_log2_complement(self) -> float:
        """``-log2(1 - z)``, evaluated stably in every regime."""
        if self.regime == Regime.HI:
            return self.payload
        if self.regime == Regime.MID:
            return -math.log1p(-self.payload) / LN2
        z = 2.0**-self.payload
        return -math.log1p(-z) / LN2

    def one_minus(self) -> "DualScaleValue":
        """Exact complement: LO and HI swap regimes, payload unchanged."""
        if self.regime == Regime.LO:
            return DualScaleValue(Regime.HI, self.payload)
        if self.regime == Regime.HI:
            return DualScaleValue(Regime.LO, self.payload)
        return DualScaleValue(Regime.MID, 1.0 - self.payload)

    def log_exponent(self) -> "LogExponent":
        """Double-log coordinate ``log2(-log2 z)``; undefined at z = 1."""
        return LogExponent.of(self)

    @property
    def is_zero(self) -> bool:
        return self.regime == Regime.LO and math.isinf(self.payload)

    @property
    def is_one(self) -> bool:
        return self.regime == Regime.HI and math.isinf(self.payload)

    # -- ordering ----------------------------------------------------------

    def compare(self, other: "DualScaleValue") -> int:
        """Three-way comparison of the represented values; exact."""
        if self.regime != other.regime:
            # canonical regimes partition [0,1] into strictly ordered bands
            return -1 if self.regime < other.regime else 1
        a, b = self.payload, other.payload
        if a == b:
            return 0
        if self.regime == Regime.LO:
            return -1 if a > b else 1
        return -1 if a < b else 1

    def __lt__(self, other: "DualScaleValue") -> bool:
        return self.compare(other) < 0

    def __le__(self, other: "DualScaleValue") -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other: "DualScaleValue") -> bool:
        return self.compare(other) > 0

    def __ge__(self, other: "DualScaleValue") -> bool:
        return self.compare(other) >= 0

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        if self.regime == Regime.LO:
            return f"DualScaleValue(z=2^-{self.payload:g})"
        if self.regime == Regime.HI:
            return f"DualScaleValue(z=1-2^-{self.payload:g})"
        return f"DualScaleValue(z={self.payload:.12g})"


@dataclass(frozen=True, slots=True)
class LogExponent:
    """The quantity ``log2(-log2 z)`` for a probability z < 1.

    This is the natural coordinate for doubly-exponentially small values:
    ``z = 2**(-2**value)``.  For a ``DualScaleValue`` in the LO regime it is
    exactly ``log2`` of the stored payload.
    """

    value: float

    @classmethod
    def of(cls, v: DualScaleValue) -> "LogExponent":
        if v.is_one:
            raise DomainError("log exponent undefined at z = 1")
        if v.regime == Regime.LO:
            return cls(math.log2(v.payload))
        if v.regime == Regime.MID:
            return cls(math.log2(-math.log2(v.payload)))
        m = 2.0**-v.payload
        if m > 0.0:
            return cls(math.log2(-math.log1p(-m) / LN2))
        # complement underflowed: -log2(z) ~ m/ln2 = 2**-M / ln2
        return cls(-v.payload - math.log2(LN2))

    def to_value(self) -> DualScaleValue:
        """The probability ``2**(-2**value)`` this exponent denotes."""
        return DualScaleValue.from_neg_log2(2.0**self.value)


def bhatt_branch(value: DualScaleValue, rule: BranchRule) -> DualScaleValue:
    """Apply one splitting-step reliability transform.

    ``PLUS`` squares, ``MINUS_UPPER`` applies ``2z - z**2`` (the erasure-exact
    upper edge of the minus branch), ``MINUS_LOWER`` applies
    ``z*sqrt(2 - z**2)`` (the lower edge).  Total on [0, 1]: the fixed points
    0 and 1 map to themselves.
    """
    if not isinstance(rule, BranchRule):
        raise DomainError(f"unknown branch rule: {rule!r}")
    r, p = _KERNELS[rule](int(value.regime), value.payload)
    return DualScaleValue(Regime(r), p)


# ---------------------------------------------------------------------------
# Gaussian tail and inverse


_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def q_tail(x: float) -> float:
    """Standard normal upper-tail probability ``P(N(0,1) > x)``."""
    x = float(x)
    if math.isnan(x):
        raise DomainError("q_tail argument must not be NaN")
    return 0.5 * math.erfc(x / _SQRT2)


# Rational approximation coefficients for the inverse normal CDF
# (minimax fit over the three classic probability bands, |rel err| < 1.2e-9
# before refinement).
_PPF_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_PPF_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_PPF_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_PPF_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_PPF_PLOW = 0.02425


def _norm_ppf_estimate(p: float) -> float:
    a, b, c, d = _PPF_A, _PPF_B, _PPF_C, _PPF_D
    if p < _PPF_PLOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    if p > 1.0 - _PPF_PLOW:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    q = p - 0.5
    r = q * q
    return (
        (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
        * q
        / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    )


def q_inv(p: float) -> float:
    """Inverse of :func:`q_tail` on (0, 1).

    A rational estimate is polished with two Newton corrections driven by the
    ``erfc``-based tail itself, giving ~1e-15 relative accuracy wherever the
    normal density is representable.  Arguments above one half go through the
    exact reflection ``q_inv(p) = -q_inv(1 - p)`` so the correction always
    differences two well-resolved tail values.
    """
    p = float(p)
    if math.isnan(p) or not (0.0 < p < 1.0):
        raise DomainError(f"q_inv argument must lie in (0, 1), got {p!r}")
    if p > 0.5:
        return -q_inv(1.0 - p)  # the complement is an exact subtraction here
    x = -_norm_ppf_estimate(p)
    for _ in range(2):
        dens = _INV_SQRT_2PI * math.exp(-0.5 * x * x)
        if dens < 1e-280:
            break  # tail estimate already at full attainable accuracy
        x += (q_tail(x) - p) / dens
    return x


# ---------------------------------------------------------------------------
# binomial tails in the log2 domain


_EXACT_TAIL_N = 1024
_REL_CUTOFF = 1e-18


def _log2_comb(n: int, k: int) -> float:
    return (
        math.lgamma(n + 1.0) - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0)
    ) / LN2


def _log2_tail_direct(n: int, k: int) -> float:
    # upper tail from its largest term C(n,k); for k > n/2 the term ratios
    # are strictly below 1, so the geometric remainder bound is valid
    s = 1.0
    t = 1.0
    i = k
    while i < n:
        ratio = (n - i) / (i + 1.0)
        t *= ratio
        s += t
        i += 1
        if ratio < 1.0 and t * ratio / (1.0 - ratio) < s * _REL_CUTOFF:
            break
    return _log2_comb(n, k) + math.log2(s)


def _log2_lower_tail_direct(n: int, k: int) -> float:
    # sum_{i=0..k} C(n,i) from its largest term C(n,k) downward; valid for
    # k <= n/2 where the ratios stay below 1
    s = 1.0
    t = 1.0
    i = k
    while i > 0:
        ratio = i / (n - i + 1.0)
        t *= ratio
        s += t
        i -= 1
        if t * ratio / (1.0 - ratio) < s * _REL_CUTOFF:
            break
    return _log2_comb(n, k) + math.log2(s)


def log2_binom_tail(n: int, k: int) -> float:
    """``log2`` of the upper binomial tail ``sum_{i=k..n} C(n, i)``.

    Exact over Python integers for ``n <= 1024``.  Beyond that, tails right
    of center accumulate term ratios downward from the largest element, and
    tails left of center go through the complement ``2**n - lower_tail``,
    which is well conditioned there because the lower part never holds more
    than half of the total mass.
    """
    n = int(n)
    k = int(k)
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"require 0 <= k <= n, got n={n}, k={k}")
    if k == 0:
        return float(n)
    if k == n:
        return 0.0
    if n <= _EXACT_TAIL_N:
        total = sum(math.comb(n, i) for i in range(k, n + 1))
        return math.log2(total)

    if 2 * k > n:
        return _log2_tail_direct(n, k)
    log2_lower = _log2_lower_tail_direct(n, k - 1)
    return n + math.log1p(-(2.0 ** (log2_lower - n))) / LN2
