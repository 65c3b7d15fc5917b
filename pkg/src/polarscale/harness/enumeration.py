"""Exact evaluation of every synthesized erasure channel at depth n.

For the erasure channel both splitting branches have closed forms
(``z**2`` and ``2z - z**2``), so the full tree of ``2**n`` reliabilities
is computable exactly in the dual-scale representation.  The tree is
built level by level with the vectorized kernels: children of the node
at position i land at positions 2i (minus) and 2i + 1 (plus), which lays
the leaves out in id order with id 0 the all-minus channel.

The cap n <= 24 keeps the leaf table around 16M entries; beyond that use
the Monte Carlo engine instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..batch import (
    leq_mask,
    geq_mask,
    float_values,
    minus_upper_arrays,
    neg_log2_arrays,
    plus_arrays,
    q_values,
)
from ..errors import DomainError, ResourceLimitError
from ..numerics import DualScaleValue, Regime

__all__ = [
    "MAX_EXACT_N",
    "Enumeration",
    "exact_enumerate_bec",
    "cdf_point",
    "mean_sqrt_q_by_level",
]

MAX_EXACT_N = 24


@dataclass(frozen=True)
class Enumeration:
    """All ``2**n`` leaf reliabilities of the splitting tree, id order.

    Leaves are stored as parallel regime/payload arrays so that values
    doubly close to 0 or 1 keep full precision.  The arrays are read-only.
    """

    n: int
    eps: float
    regimes: np.ndarray
    payloads: np.ndarray

    def __post_init__(self) -> None:
        expected = (1 << self.n,)
        if self.regimes.shape != expected or self.payloads.shape != expected:
            raise DomainError(
                f"leaf arrays must have shape {expected}, got "
                f"{self.regimes.shape} and {self.payloads.shape}"
            )

    @property
    def size(self) -> int:
        return 1 << self.n

    def leaf(self, idx: int) -> DualScaleValue:
        if not 0 <= idx < self.size:
            raise DomainError(f"leaf id {idx!r} outside [0, {self.size})")
        return DualScaleValue(Regime(int(self.regimes[idx])), float(self.payloads[idx]))

    def neg_log2_leaves(self) -> np.ndarray:
        """Reliability levels L_id = -log2 Z_id for every leaf."""
        with np.errstate(divide="ignore"):
            return neg_log2_arrays(self.regimes, self.payloads)

    def float_leaves(self) -> np.ndarray:
        """Nearest-float view of the leaf values."""
        return float_values(self.regimes, self.payloads)

    def count_leq(self, threshold: DualScaleValue) -> int:
        return int(np.count_nonzero(leq_mask(self.regimes, self.payloads, threshold)))

    def count_geq(self, threshold: DualScaleValue) -> int:
        return int(np.count_nonzero(geq_mask(self.regimes, self.payloads, threshold)))

    def mean_value(self) -> float:
        """Mean of the leaf values; conserved by splitting ( = eps)."""
        return float(np.mean(self.float_leaves()))


def _check_eps(eps: float) -> None:
    if not (isinstance(eps, (int, float)) and 0.0 < eps < 1.0):
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")


def _level_arrays(eps: float, n: int):
    """Yield (depth, regimes, payloads) for depths 0 .. n."""
    start = DualScaleValue.from_float(eps)
    regimes = np.array([int(start.regime)], dtype=np.int8)
    payloads = np.array([start.payload], dtype=np.float64)
    yield 0, regimes, payloads
    for depth in range(1, n + 1):
        minus_r, minus_p = minus_upper_arrays(regimes, payloads)
        plus_r, plus_p = plus_arrays(regimes, payloads)
        regimes = np.empty(1 << depth, dtype=np.int8)
        payloads = np.empty(1 << depth, dtype=np.float64)
        regimes[0::2] = minus_r
        regimes[1::2] = plus_r
        payloads[0::2] = minus_p
        payloads[1::2] = plus_p
        yield depth, regimes, payloads


def exact_enumerate_bec(eps: float, n: int) -> Enumeration:
    """Evaluate all ``2**n`` splitting paths exactly for an erasure channel.

    Deterministic; leaves come out in id order (binary path word, most
    significant branch first, 1 = plus).
    """
    _check_eps(eps)
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n!r}")
    if n > MAX_EXACT_N:
        raise ResourceLimitError(
            f"exact enumeration is capped at n = {MAX_EXACT_N} (2**{MAX_EXACT_N} "
            f"leaves); for n = {n} use the Monte Carlo engine instead"
        )
    for depth, regimes, payloads in _level_arrays(eps, n):
        pass
    regimes.flags.writeable = False
    payloads.flags.writeable = False
    return Enumeration(n=n, eps=float(eps), regimes=regimes, payloads=payloads)


def mean_sqrt_q_by_level(eps: float, n: int) -> np.ndarray:
    """Exact E[sqrt(Z_d * (1 - Z_d))] for every depth d in 0 .. n.

    Walks the same level-by-level construction as the enumerator but only
    keeps the running expectation, so the memory high-water mark is one
    level of the tree.
    """
    _check_eps(eps)
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n!r}")
    if n > MAX_EXACT_N:
        raise ResourceLimitError(
            f"exact level means are capped at n = {MAX_EXACT_N}, got {n}"
        )
    means = np.empty(n + 1, dtype=np.float64)
    for depth, regimes, payloads in _level_arrays(eps, n):
        means[depth] = float(np.mean(np.sqrt(q_values(regimes, payloads))))
    return means


def cdf_point(en: Enumeration, threshold: DualScaleValue) -> float:
    """Fraction of leaves with value <= threshold."""
    return en.count_leq(threshold) / en.size
