"""Seeded Monte Carlo estimation of path-process event probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from ..batch import evolve_dual, evolve_upper
from ..errors import DomainError
from ..numerics import DualScaleValue
from ..processes import ProcessKind

__all__ = ["ProcessArrays", "EventPredicate", "mc_event_probability"]

_DUAL_KINDS = (ProcessKind.BEC_EXACT, ProcessKind.LOWER, ProcessKind.E_PROC)


@dataclass(frozen=True)
class ProcessArrays:
    """Final per-trial process state handed to an event predicate.

    Dual-scale processes populate ``regimes``/``payloads``; the
    exponent-domain upper process populates ``a``.  ``ones`` always holds
    the per-trial count of plus branches.
    """

    ones: np.ndarray
    regimes: Optional[np.ndarray] = None
    payloads: Optional[np.ndarray] = None
    a: Optional[np.ndarray] = None


EventPredicate = Callable[[ProcessArrays], np.ndarray]


def mc_event_probability(
    kind: ProcessKind,
    init: Union[float, DualScaleValue],
    n: int,
    event: EventPredicate,
    trials: int,
    seed: int,
) -> Tuple[float, float]:
    """Estimate P(event) over ``trials`` independent n-step paths.

    Returns the empirical probability and its binomial standard error
    ``sqrt(p(1-p)/trials)``.  Deterministic per seed; raising the trial
    count extends the same trial stream rather than reshuffling it.
    """
    if trials < 100:
        raise DomainError(f"trials must be at least 100, got {trials!r}")
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n!r}")
    if kind is ProcessKind.UPPER:
        z0 = init.to_float() if isinstance(init, DualScaleValue) else float(init)
        if not 0.0 < z0 <= 1.0:
            raise DomainError(f"init must lie in (0, 1] for the upper process, got {init!r}")
        a, ones = evolve_upper(-math.log2(z0), n, trials, seed)
        arrays = ProcessArrays(ones=ones, a=a)
    elif kind in _DUAL_KINDS:
        start = init if isinstance(init, DualScaleValue) else DualScaleValue.from_float(float(init))
        regimes, payloads, ones = evolve_dual(kind, start, n, trials, seed)
        arrays = ProcessArrays(ones=ones, regimes=regimes, payloads=payloads)
    else:
        raise DomainError(f"process kind {kind!r} is not supported for Monte Carlo")
    mask = np.asarray(event(arrays), dtype=bool)
    if mask.shape != arrays.ones.shape:
        raise DomainError(
            f"event predicate returned shape {mask.shape}, expected {arrays.ones.shape}"
        )
    p_hat = float(np.count_nonzero(mask)) / trials
    sigma = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return p_hat, sigma
