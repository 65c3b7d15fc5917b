"""Vectorized twins of the scalar regime kernels, plus seeded trial streams.

Monte Carlo runs push 10^5..10^6 coupled trajectories through hundreds of
branching steps; doing that through per-object scalar stepping would dominate
every runtime budget.  This module re-states the three branch transforms of
:mod:`polarscale.numerics` over parallel ``(regime, payload)`` arrays with
formula-for-formula identical algebra (the unit tests pin the two
implementations together on dense grids and random regime mixes).

Trials are split into fixed-size chunks; chunk ``i`` of a run draws all of
its randomness from a counter-based generator keyed by ``(seed, i)``, so
results are reproducible and independent of how chunks would be scheduled.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator

import numpy as np

from .numerics import CROSSOVER_EXP, CROSSOVER_TAU, LN2, DualScaleValue, Regime
from .processes import ProcessKind

__all__ = [
    "CHUNK_TRIALS",
    "chunk_generator",
    "iter_chunks",
    "plus_arrays",
    "minus_upper_arrays",
    "minus_lower_arrays",
    "neg_log2_arrays",
    "complement_neg_log2_arrays",
    "float_values",
    "leq_mask",
    "geq_mask",
    "evolve_dual",
    "evolve_upper",
]

_LO, _MID, _HI = int(Regime.LO), int(Regime.MID), int(Regime.HI)

_MID_LO_EDGE = CROSSOVER_TAU
_MID_HI_EDGE = 1.0 - CROSSOVER_TAU

#: trials per random stream; fixed so results never depend on scheduling
CHUNK_TRIALS = 8192


def _exp_clamp(x: np.ndarray) -> np.ndarray:
    # same hairline guard as the scalar kernels: a payload computed after a
    # regime change must not round past the crossover
    return np.maximum(x, CROSSOVER_EXP)


def _mid_clamp(z: np.ndarray) -> np.ndarray:
    return np.clip(z, _MID_LO_EDGE, _MID_HI_EDGE)


def chunk_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator owning all randomness of one trial chunk."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,)))
    )


def iter_chunks(trials: int, chunk: int = CHUNK_TRIALS) -> Iterator[tuple[int, int]]:
    """Yield ``(chunk_index, chunk_size)`` covering ``trials`` trials."""
    index = 0
    left = trials
    while left > 0:
        size = min(chunk, left)
        yield index, size
        index += 1
        left -= size


def _exp2(x: np.ndarray) -> np.ndarray:
    return np.exp2(x)


def plus_arrays(r: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vector form of the ``PLUS`` kernel (z -> z**2)."""
    out_r = r.copy()
    out_p = p.copy()
    lo = r == _LO
    if lo.any():
        out_p[lo] = 2.0 * p[lo]
    mid = r == _MID
    if mid.any():
        z = p[mid]
        v = z * z
        rr = np.full(z.shape, _MID, dtype=r.dtype)
        small = v < CROSSOVER_TAU
        if small.any():
            v[small] = _exp_clamp(-2.0 * np.log2(z[small]))
            rr[small] = _LO
        out_r[mid] = rr
        out_p[mid] = v
    hi = r == _HI
    if hi.any():
        ph = p[hi]
        m = _exp2(-ph)
        mp = ph - 1.0 - np.log1p(-0.5 * m) / LN2
        rr = np.full(ph.shape, _HI, dtype=r.dtype)
        back = mp < CROSSOVER_EXP
        if back.any():
            mp[back] = _mid_clamp(1.0 - _exp2(-mp[back]))
            rr[back] = _MID
        out_r[hi] = rr
        out_p[hi] = mp
    return out_r, out_p


def minus_upper_arrays(r: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vector form of the ``MINUS_UPPER`` kernel (z -> 2z - z**2)."""
    out_r = r.copy()
    out_p = p.copy()
    lo = r == _LO
    if lo.any():
        pl = p[lo]
        z = _exp2(-pl)
        lp = pl - 1.0 - np.log1p(-0.5 * z) / LN2
        rr = np.full(pl.shape, _LO, dtype=r.dtype)
        back = lp < CROSSOVER_EXP
        if back.any():
            lp[back] = _mid_clamp(_exp2(-lp[back]))
            rr[back] = _MID
        out_r[lo] = rr
        out_p[lo] = lp
    mid = r == _MID
    if mid.any():
        z = p[mid]
        res = np.empty_like(z)
        rr = np.full(z.shape, _MID, dtype=r.dtype)
        low = z < 0.5
        if low.any():
            zl = z[low]
            res[low] = zl * (2.0 - zl)
        high = ~low
        if high.any():
            m = 1.0 - z[high]
            m2 = m * m
            sub = 1.0 - m2
            deep = m2 < CROSSOVER_TAU
            if deep.any():
                sub[deep] = _exp_clamp(-2.0 * np.log2(m[deep]))
            res[high] = sub
            rr_h = np.full(m.shape, _MID, dtype=r.dtype)
            rr_h[deep] = _HI
            rr[high] = rr_h
        out_r[mid] = rr
        out_p[mid] = res
    hi = r == _HI
    if hi.any():
        out_p[hi] = 2.0 * p[hi]
    return out_r, out_p


def minus_lower_arrays(r: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vector form of the ``MINUS_LOWER`` kernel (z -> z*sqrt(2 - z**2))."""
    out_r = r.copy()
    out_p = p.copy()
    lo = r == _LO
    if lo.any():
        pl = p[lo]
        z2 = _exp2(-2.0 * pl)
        lp = pl - 0.5 - 0.5 * np.log1p(-0.5 * z2) / LN2
        rr = np.full(pl.shape, _LO, dtype=r.dtype)
        back = lp < CROSSOVER_EXP
        if back.any():
            lp[back] = _mid_clamp(_exp2(-lp[back]))
            rr[back] = _MID
        out_r[lo] = rr
        out_p[lo] = lp
    mid = r == _MID
    if mid.any():
        z = p[mid]
        res = np.empty_like(z)
        rr = np.full(z.shape, _MID, dtype=r.dtype)
        low = z < 0.5
        if low.any():
            zl = z[low]
            res[low] = zl * np.sqrt(2.0 - zl * zl)
        high = ~low
        if high.any():
            m = 1.0 - z[high]
            u = m * (2.0 - m)
            u *= u
            small = u / (1.0 + np.sqrt(1.0 - u))
            sub = 1.0 - small
            deep = small < CROSSOVER_TAU
            if deep.any():
                sub[deep] = _exp_clamp(-np.log2(small[deep]))
            res[high] = sub
            rr_h = np.full(m.shape, _MID, dtype=r.dtype)
            rr_h[deep] = _HI
            rr[high] = rr_h
        out_r[mid] = rr
        out_p[mid] = res
    hi = r == _HI
    if hi.any():
        ph = p[hi]
        m = _exp2(-ph)
        log2_2m = 1.0 + np.log1p(-0.5 * m) / LN2
        u = m * (2.0 - m)
        u *= u
        small = u / (1.0 + np.sqrt(1.0 - u))
        out_p[hi] = 2.0 * (ph - log2_2m) + 1.0 + np.log1p(-0.5 * small) / LN2
    return out_r, out_p


_DUAL_ARRAY_RULES: dict[
    ProcessKind,
    tuple[Callable | None, Callable],
] = {
    ProcessKind.BEC_EXACT: (minus_upper_arrays, plus_arrays),
    ProcessKind.LOWER: (None, plus_arrays),
    ProcessKind.E_PROC: (minus_lower_arrays, plus_arrays),
}


def neg_log2_arrays(r: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Stable ``-log2(z)`` per lane."""
    out = p.copy()
    mid = r == _MID
    if mid.any():
        out[mid] = -np.log2(p[mid])
    hi = r == _HI
    if hi.any():
        out[hi] = -np.log1p(-_exp2(-p[hi])) / LN2
    return out


def complement_neg_log2_arrays(r: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Stable ``-log2(1 - z)`` per lane."""
    out = p.copy()
    mid = r == _MID
    if mid.any():
        out[mid] = -np.log1p(-p[mid]) / LN2
    lo = r == _LO
    if lo.any():
        out[lo] = -np.log1p(-_exp2(-p[lo])) / LN2
    return out


def float_values(r: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Nearest-float view of each lane (LO and HI collapse toward 0 and 1)."""
    out = p.copy()
    lo = r == _LO
    if lo.any():
        out[lo] = _exp2(-p[lo])
    hi = r == _HI
    if hi.any():
        out[hi] = 1.0 - _exp2(-p[hi])
    return out


def q_values(r: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Stable ``z * (1 - z)`` per lane.

    Near either endpoint the product equals ``m * (1 - m)`` for the small
    side ``m``, so LO and HI lanes evaluate it from the stored exponent
    without forming the doomed complement.
    """
    out = np.empty_like(p)
    mid = r == _MID
    if mid.any():
        out[mid] = p[mid] * (1.0 - p[mid])
    edge = ~mid
    if edge.any():
        m = _exp2(-p[edge])
        out[edge] = m * (1.0 - m)
    return out


def leq_mask(r: np.ndarray, p: np.ndarray, threshold: DualScaleValue) -> np.ndarray:
    """Lanes whose represented value is <= ``threshold`` (exact comparison)."""
    tr = int(threshold.regime)
    tp = threshold.payload
    if tr == _LO:
        return (r == _LO) & (p >= tp)
    if tr == _MID:
        return (r == _LO) | ((r == _MID) & (p <= tp))
    return (r != _HI) | (p <= tp)


def geq_mask(r: np.ndarray, p: np.ndarray, threshold: DualScaleValue) -> np.ndarray:
    """Lanes whose represented value is >= ``threshold`` (exact comparison)."""
    tr = int(threshold.regime)
    tp = threshold.payload
    if tr == _HI:
        return (r == _HI) & (p >= tp)
    if tr == _MID:
        return (r == _HI) | ((r == _MID) & (p >= tp))
    return (r != _LO) | (p <= tp)


StepHook = Callable[[int, np.ndarray, np.ndarray, np.ndarray], None]


def evolve_dual(
    kind: ProcessKind,
    start: DualScaleValue,
    n: int,
    trials: int,
    seed: int,
    step_hook: StepHook | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evolve ``trials`` independent dual-scale trajectories for ``n`` steps.

    Returns final ``(regimes, payloads, ones)`` arrays across all chunks.  The
    optional ``step_hook(step, regimes, payloads, ones)`` sees each chunk
    after every step (used for pathwise checks); hook calls must not mutate
    their arguments.

    Bits are drawn at the full chunk width even for a trailing partial chunk,
    so the first ``m`` trials of any run are identical to a run asked for
    only ``m`` trials.
    """
    op0, op1 = _DUAL_ARRAY_RULES[kind]
    out_r = np.empty(trials, dtype=np.int8)
    out_p = np.empty(trials, dtype=np.float64)
    out_ones = np.empty(trials, dtype=np.int64)
    with np.errstate(divide="ignore"):
        for index, size in iter_chunks(trials):
            gen = chunk_generator(seed, index)
            r = np.full(size, int(start.regime), dtype=np.int8)
            p = np.full(size, start.payload, dtype=np.float64)
            ones = np.zeros(size, dtype=np.int64)
            for t in range(n):
                draw = gen.integers(0, 2, size=CHUNK_TRIALS, dtype=np.uint8)
                bits = draw[:size].astype(bool)
                r1, p1 = op1(r, p)
                if op0 is None:
                    r0, p0 = r, p
                else:
                    r0, p0 = op0(r, p)
                r = np.where(bits, r1, r0)
                p = np.where(bits, p1, p0)
                ones += bits
                if step_hook is not None:
                    step_hook(t, r, p, ones)
            base = index * CHUNK_TRIALS
            out_r[base : base + size] = r
            out_p[base : base + size] = p
            out_ones[base : base + size] = ones
    return out_r, out_p, out_ones


def evolve_upper(
    a0: float,
    n: int,
    trials: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Evolve the ``UPPER`` exponent recursion; returns ``(a, ones)``."""
    out_a = np.empty(trials, dtype=np.float64)
    out_ones = np.empty(trials, dtype=np.int64)
    for index, size in iter_chunks(trials):
        gen = chunk_generator(seed, index)
        a = np.full(size, float(a0), dtype=np.float64)
        ones = np.zeros(size, dtype=np.int64)
        for _ in range(n):
            draw = gen.integers(0, 2, size=CHUNK_TRIALS, dtype=np.uint8)
            bits = draw[:size].astype(bool)
            a = np.where(bits, 2.0 * a, a - 1.0)
            ones += bits
        base = index * CHUNK_TRIALS
        out_a[base : base + size] = a
        out_ones[base : base + size] = ones
    return out_a, out_ones
