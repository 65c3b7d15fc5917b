"""Independent reference computations used to pin the package numerics.

Everything here is deliberately slow and simple: exact integer sums,
arbitrary-precision transcendentals via mpmath, and a from-first-principles
erasure channel splitter over explicit output alphabets.  None of it imports
the package internals beyond plain value types, so agreement between the two
is evidence rather than tautology.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath as mp

from polarscale.numerics import DualScaleValue, Regime

_DPS = 80


def _nl(x: mp.mpf) -> float:
    """-log2(x) of a directly held positive mpf."""
    return float(-mp.log(x) / mp.log(2))


def _nl_of_complement(c: mp.mpf) -> float:
    """-log2(1 - c) for an mpf c in [0, 1), stable for tiny c."""
    if c > mp.mpf("1e-8"):
        return float(-mp.log(1 - c) / mp.log(2))
    # four series terms leave a relative error ~c**4, far below float noise
    return float((c + c * c / 2 + c**3 / 3 + c**4 / 4) / mp.log(2))


def _small_side(v: DualScaleValue) -> tuple[str, mp.mpf]:
    """Exact mpf embedding of whichever of z, 1-z is resolved by the payload."""
    if v.regime == Regime.LO:
        return "z", mp.mpf(2) ** mp.mpf(-v.payload)
    if v.regime == Regime.HI:
        return "m", mp.mpf(2) ** mp.mpf(-v.payload)
    z = mp.mpf(v.payload)
    if z <= mp.mpf("0.5"):
        return "z", z
    return "m", 1 - z


def branch_logs(v: DualScaleValue, rule: str) -> tuple[float, float]:
    """High-precision ``(-log2(out), -log2(1-out))`` of one branch transform.

    ``rule`` is one of ``"plus"``, ``"minus_upper"``, ``"minus_lower"``.  The
    input is taken exactly from its stored payload, the transform is applied
    at 80 significant digits in whichever of the z / 1-z domains is stable,
    and both logs are returned as floats (the complement log underflows to
    0.0 for astronomically small complements, matching float arithmetic).
    """
    with mp.workdps(_DPS):
        side, s = _small_side(v)
        if rule == "plus":
            if side == "z":
                out = s * s
                return _nl(out), _nl_of_complement(out)
            comp = s * (2 - s)  # 1 - (1-m)**2
            return _nl_of_complement(comp), _nl(comp)
        if rule == "minus_upper":
            if side == "z":
                out = s * (2 - s)
                # 1 - out = (1-s)**2, so the complement log is twice that of s
                return _nl(out), 2.0 * _nl_of_complement(s)
            comp = s * s
            return _nl_of_complement(comp), _nl(comp)
        if rule == "minus_lower":
            if side == "z":
                out = s * mp.sqrt(2 - s * s)
                return _nl(out), _nl_of_complement(out)
            u = (s * (2 - s)) ** 2
            comp = u / (1 + mp.sqrt(1 - u))
            return _nl_of_complement(comp), _nl(comp)
    raise ValueError(f"unknown rule {rule!r}")


def gauss_upper_tail(x: float) -> float:
    """P(N(0,1) > x) at 80 digits."""
    with mp.workdps(_DPS):
        return float(mp.erfc(mp.mpf(x) / mp.sqrt(2)) / 2)


def gauss_upper_tail_inverse(p: float) -> float:
    """Inverse tail for moderate p, via the arbitrary-precision erfinv."""
    with mp.workdps(_DPS):
        return float(mp.sqrt(2) * mp.erfinv(1 - 2 * mp.mpf(p)))


def binom_tail_int(n: int, k: int) -> int:
    """Exact integer upper tail ``sum_{i=k..n} C(n, i)``."""
    term = math.comb(n, k)
    total = term
    for i in range(k, n):
        term = term * (n - i) // (i + 1)
        total += term
    return total


def log2_binom_tail_exact(n: int, k: int) -> float:
    return math.log2(binom_tail_int(n, k))


def _bec_channel(eps: Fraction) -> dict[tuple[int, ...], tuple[Fraction, Fraction]]:
    """Erasure channel as explicit output table: y -> (W(y|0), W(y|1))."""
    keep = 1 - eps
    return {
        (0,): (keep, Fraction(0)),
        (1,): (Fraction(0), keep),
        (2,): (eps, eps),  # symbol 2 is the erasure
    }


def _bhattacharyya(table: dict) -> Fraction:
    """Sum of sqrt(W(y|0) W(y|1)); exact because erasure-derived channels
    only ever pair equal or vanishing likelihoods."""
    total = Fraction(0)
    for w0, w1 in table.values():
        if w0 == w1:
            total += w0
        elif w0 == 0 or w1 == 0:
            continue
        else:  # pragma: no cover - would need a non-erasure-like channel
            raise ValueError("output with unequal nonzero likelihoods")
    return total


def bec_split_bhattacharyya(eps: Fraction) -> tuple[Fraction, Fraction]:
    """Exact (Z of the worse child, Z of the better child) for an erasure
    channel, computed from the defining channel combinations rather than any
    closed form."""
    w = _bec_channel(eps)
    ys = list(w)
    half = Fraction(1, 2)

    worse: dict[tuple, tuple[Fraction, Fraction]] = {}
    for y1 in ys:
        for y2 in ys:
            probs = []
            for u1 in (0, 1):
                acc = Fraction(0)
                for u2 in (0, 1):
                    acc += half * w[y1][u1 ^ u2] * w[y2][u2]
                probs.append(acc)
            worse[y1 + y2] = (probs[0], probs[1])

    better: dict[tuple, tuple[Fraction, Fraction]] = {}
    for y1 in ys:
        for y2 in ys:
            for u1 in (0, 1):
                p0 = half * w[y1][u1 ^ 0] * w[y2][0]
                p1 = half * w[y1][u1 ^ 1] * w[y2][1]
                better[y1 + y2 + (u1,)] = (p0, p1)

    return _bhattacharyya(worse), _bhattacharyya(better)


def naive_plus(z: float) -> float:
    return z * z


def naive_minus_upper(z: float) -> float:
    return 2.0 * z - z * z


def naive_minus_lower(z: float) -> float:
    return z * math.sqrt(2.0 - z * z)
