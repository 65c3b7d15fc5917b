"""Random processes driven by fair branching bits.

A path of ``n`` fair bits ``B_1..B_n`` (``B_i = 1`` picks the plus branch)
drives several coupled recursions on a starting reliability ``z_0``:

* ``BEC_EXACT``     - the erasure-channel recursion itself: ``PLUS`` on 1,
                      ``MINUS_UPPER`` on 0.  Exact for the BEC.
* ``BMS_INTERVAL``  - a bracket ``[lo, hi]`` valid for every binary-input
                      memoryless symmetric channel: both ends square on 1;
                      on 0 the low end takes ``MINUS_LOWER`` and the high end
                      ``MINUS_UPPER``.
* ``UPPER``         - the dominating process tracked as ``A = -log2(z)``:
                      ``A -> 2A`` on 1 (squaring) and ``A -> A - 1`` on 0
                      (doubling of the value).
* ``LOWER``         - the dominated process: squares on 1, unchanged on 0,
                      hence exactly ``z_0 ** (2 ** sum(B_i))``.
* ``E_PROC``        - the mirrored recursion used for values near 1:
                      ``PLUS`` on 1, ``MINUS_LOWER`` on 0.

Paths also appear in run-length form: a word like ``1,0,0,1,0,0,0,1``
decomposes into a first bit and maximal runs ``(1, 2, 1, 3, 1)``.  For a
word starting with 1 the ``UPPER`` recursion telescopes into the closed form

    ``A_n = 2**(r_1 + r_3 + ...) * (a_0 - sum_{even j} r_j * 2**(-(r_1 + r_3
    + ... + r_{j-1})))``

implemented by :func:`a_closed_form` and cross-checkable against the
step-by-step :func:`a_iterate`.

Bit streams come from counter-based generators keyed by ``(seed, stream)``
so runs are reproducible and trivially parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .errors import DomainError, InternalCheckError, UnsupportedCaseError
from .numerics import BranchRule, DualScaleValue, Regime, bhatt_branch

__all__ = [
    "PathWord",
    "RunSequence",
    "run_decompose",
    "run_compose",
    "a_iterate",
    "a_closed_form",
    "ProcessKind",
    "ProcessState",
    "step",
    "sample_path",
    "q_observable",
    "bsc_bhattacharyya",
    "path_generator",
]


@dataclass(frozen=True, slots=True)
class PathWord:
    """A finite word of branching bits; ``bits[i] = 1`` means plus."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise DomainError(f"path bits must be 0 or 1: {self.bits!r}")

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def ones(self) -> int:
        return sum(self.bits)


@dataclass(frozen=True, slots=True)
class RunSequence:
    """Run-length encoding of a path word: first bit plus maximal run lengths."""

    first_bit: int
    runs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.first_bit not in (0, 1):
            raise DomainError(f"first_bit must be 0 or 1: {self.first_bit!r}")
        if not self.runs:
            raise DomainError("a run sequence needs at least one run")
        if any((not isinstance(r, int)) or r < 1 for r in self.runs):
            raise DomainError(f"run lengths must be integers >= 1: {self.runs!r}")

    @property
    def n(self) -> int:
        return sum(self.runs)


def run_decompose(path: PathWord) -> RunSequence:
    """Split a nonempty path into its maximal constant runs."""
    if path.n == 0:
        raise DomainError("cannot decompose an empty path")
    runs: list[int] = []
    current = path.bits[0]
    length = 0
    for b in path.bits:
        if b == current:
            length += 1
        else:
            runs.append(length)
            current = b
            length = 1
    runs.append(length)
    return RunSequence(first_bit=path.bits[0], runs=tuple(runs))


def run_compose(rs: RunSequence) -> PathWord:
    """Inverse of :func:`run_decompose`."""
    bits: list[int] = []
    b = rs.first_bit
    for r in rs.runs:
        bits.extend([b] * r)
        b ^= 1
    return PathWord(tuple(bits))


def a_iterate(a0: float, path: PathWord) -> float:
    """Run the ``UPPER`` recursion ``A -> 2A`` (bit 1) / ``A -> A - 1`` (bit 0)."""
    a = float(a0)
    for b in path.bits:
        a = 2.0 * a if b else a - 1.0
    return a


def a_closed_form(a0: float, rs: RunSequence) -> float:
    """Telescoped value of the ``UPPER`` recursion for a word starting with 1.

    Odd-position runs are 1-runs (each doubles ``A`` per step), even-position
    runs are 0-runs (each subtracts 1 per step), giving

        ``2**(sum odd runs) * (a0 - sum_{even j} r_j * 2**(-sum of odd runs
        before j))``.
    """
    if rs.first_bit != 1:
        raise UnsupportedCaseError("closed form requires a word starting with 1")
    odd_total = 0
    subtracted = 0.0
    prefix_ones = 0
    for j, r in enumerate(rs.runs, start=1):
        if j % 2 == 1:
            prefix_ones += r
            odd_total += r
        else:
            subtracted += r * 2.0**-prefix_ones
    return 2.0**odd_total * (float(a0) - subtracted)


class ProcessKind(Enum):
    BEC_EXACT = "bec_exact"
    BMS_INTERVAL = "bms_interval"
    UPPER = "upper"
    LOWER = "lower"
    E_PROC = "e_proc"


#: bit value -> branch rule (None = value unchanged) for the dual-scale kinds
_DUAL_RULES: dict[ProcessKind, tuple[BranchRule | None, BranchRule]] = {
    ProcessKind.BEC_EXACT: (BranchRule.MINUS_UPPER, BranchRule.PLUS),
    ProcessKind.LOWER: (None, BranchRule.PLUS),
    ProcessKind.E_PROC: (BranchRule.MINUS_LOWER, BranchRule.PLUS),
}

StateValue = Union[DualScaleValue, float, tuple[DualScaleValue, DualScaleValue]]


@dataclass(frozen=True, slots=True)
class ProcessState:
    """A process tag together with its current value.

    ``BEC_EXACT``, ``LOWER`` and ``E_PROC`` carry a :class:`DualScaleValue`;
    ``BMS_INTERVAL`` carries an ordered pair of them; ``UPPER`` carries the
    real exponent ``A`` (any sign; the represented value is ``2**-A``).
    """

    kind: ProcessKind
    value: StateValue

    def __post_init__(self) -> None:
        k, v = self.kind, self.value
        if k == ProcessKind.UPPER:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InternalCheckError(f"UPPER state needs a real exponent: {v!r}")
            if math.isnan(v):
                raise InternalCheckError("UPPER exponent must not be NaN")
            object.__setattr__(self, "value", float(v))
        elif k == ProcessKind.BMS_INTERVAL:
            ok = (
                isinstance(v, tuple)
                and len(v) == 2
                and all(isinstance(e, DualScaleValue) for e in v)
            )
            if not ok:
                raise InternalCheckError(f"BMS_INTERVAL state needs a value pair: {v!r}")
            if v[0] > v[1]:
                raise InternalCheckError("interval ends out of order")
        elif not isinstance(v, DualScaleValue):
            raise InternalCheckError(f"{k.name} state needs a DualScaleValue: {v!r}")

    @classmethod
    def from_start(cls, kind: ProcessKind, z0: float) -> "ProcessState":
        """Start a process of the given kind from the plain probability ``z0``."""
        if kind == ProcessKind.UPPER:
            if not (0.0 < z0 <= 1.0):
                raise DomainError(f"UPPER start needs z0 in (0, 1], got {z0!r}")
            return cls(kind, -math.log2(z0))
        v = DualScaleValue.from_float(z0)
        if kind == ProcessKind.BMS_INTERVAL:
            return cls(kind, (v, v))
        return cls(kind, v)


def step(state: ProcessState, bit: int) -> ProcessState:
    """Advance a process by one branching bit."""
    if bit not in (0, 1):
        raise DomainError(f"branching bit must be 0 or 1: {bit!r}")
    k = state.kind
    if k == ProcessKind.UPPER:
        a = state.value
        return ProcessState(k, 2.0 * a if bit else a - 1.0)
    if k == ProcessKind.BMS_INTERVAL:
        lo, hi = state.value
        if bit:
            return ProcessState(
                k,
                (bhatt_branch(lo, BranchRule.PLUS), bhatt_branch(hi, BranchRule.PLUS)),
            )
        return ProcessState(
            k,
            (
                bhatt_branch(lo, BranchRule.MINUS_LOWER),
                bhatt_branch(hi, BranchRule.MINUS_UPPER),
            ),
        )
    rule0, rule1 = _DUAL_RULES[k]
    rule = rule1 if bit else rule0
    if rule is None:
        return state
    return ProcessState(k, bhatt_branch(state.value, rule))


def path_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based bit source keyed by ``(seed, stream)``."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,)))
    )


def sample_path(
    kind: ProcessKind,
    init: StateValue,
    n: int,
    seed: int,
    stream: int = 0,
) -> tuple[ProcessState, int, PathWord]:
    """Drive a fresh process for ``n`` fair bits.

    Returns the final state, the number of 1-bits, and the path itself.  The
    bit word is a deterministic function of ``(seed, stream)`` alone.
    """
    if n < 0:
        raise DomainError(f"path length must be >= 0, got {n}")
    state = ProcessState(kind, init)
    if n == 0:
        return state, 0, PathWord(())
    bits = path_generator(seed, stream).integers(0, 2, size=n, dtype=np.uint8)
    for b in bits:
        state = step(state, int(b))
    word = PathWord(tuple(int(b) for b in bits))
    return state, word.ones, word


def q_observable(v: DualScaleValue) -> float:
    """``z(1 - z)`` evaluated without cancellation in any regime.

    Underflows to 0.0 once the smaller factor drops below the float range,
    which is the right answer for every monotone use of this observable.
    """
    if v.regime == Regime.MID:
        z = v.payload
        return z * (1.0 - z)
    m = 2.0**-v.payload  # the small side, in LO and HI alike
    return m * (1.0 - m)


def bsc_bhattacharyya(p: float) -> float:
    """Reliability parameter ``2*sqrt(p(1-p))`` of the binary symmetric channel."""
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"crossover probability outside [0, 1]: {p!r}")
    return 2.0 * math.sqrt(p * (1.0 - p))
