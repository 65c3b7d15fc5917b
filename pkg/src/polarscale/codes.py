"""Index selection rules and block-error bounds for synthesized channels.

Two constructions pick ``ceil(2**n * R)`` of the ``2**n`` synthesized
channels: ``polar_select`` keeps the most reliable ones (largest
L = -log2 Z), ``rm_select`` keeps the ids of largest binary weight.
``overlap_fraction`` measures how much two selections agree.

Error bounds for a selection: ``map_lower_bound`` turns the minimum
selected weight into a doubly-exponential lower bound on block error under
optimal decoding, ``sc_union_bound`` sums per-channel reliabilities into
the standard successive-cancellation upper bound, and ``sc_simulate_bec``
estimates the successive-cancellation block-error rate on an erasure
channel by Monte Carlo.

Ids are 0-based throughout: the binary expansion of the id, read from the
most significant of the n bits, gives the sequence of channel-splitting
branches (1 = plus, 0 = minus), so id 0 is the all-minus channel and
weights count ones in the 0-based id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, unique
from fractions import Fraction
from typing import FrozenSet, Literal, Mapping, Optional, Tuple

import numpy as np

from .batch import chunk_generator, iter_chunks
from .errors import DomainError, ResourceLimitError
from .numerics import DualScaleValue, LogExponent

__all__ = [
    "PLUS",
    "MINUS",
    "IndexSelection",
    "BoundKind",
    "ErrorBound",
    "branch_sequence",
    "polar_select",
    "rm_select",
    "overlap_fraction",
    "map_lower_bound",
    "sc_union_bound",
    "sc_simulate_bec",
]

PLUS = "plus"
MINUS = "minus"
Branch = Literal["plus", "minus"]

# Largest n for which 2**n-sized tables are built eagerly.
_MAX_TABLE_N = 24

# Trials per random chunk in the simulator.  Each chunk draws its full
# width of randomness even when only a prefix is consumed, so enlarging
# the trial count extends a run instead of reshuffling it.
SC_CHUNK_TRIALS = 1024


def _selection_size(n: int, rate: float) -> int:
    # ceil(2**n * rate) on the exact binary rational, immune to float
    # rounding of the product.
    return int(math.ceil(Fraction(rate) * (1 << n)))


def _check_rate(rate: float) -> None:
    if not (isinstance(rate, (int, float)) and 0.0 < rate <= 1.0):
        raise DomainError(f"rate must lie in (0, 1], got {rate!r}")


@dataclass(frozen=True)
class IndexSelection:
    """A chosen set of synthesized-channel ids at block exponent n.

    ``reliabilities`` maps ids to L = -log2 Z where available (the
    weight-based construction carries none); ``weights`` maps every
    selected id to its binary popcount.
    """

    n: int
    rate: float
    indices: FrozenSet[int]
    reliabilities: Mapping[int, float] = field(default_factory=dict)
    weights: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise DomainError(f"n must be non-negative, got {self.n!r}")
        _check_rate(self.rate)
        size = _selection_size(self.n, self.rate)
        if len(self.indices) != size:
            raise DomainError(
                f"selection holds {len(self.indices)} ids, expected "
                f"ceil(2**{self.n} * {self.rate}) = {size}"
            )
        block = 1 << self.n
        for idx in self.indices:
            if not 0 <= idx < block:
                raise DomainError(f"id {idx!r} outside [0, {block})")
            expected = idx.bit_count()
            if self.weights.get(idx) != expected:
                raise DomainError(
                    f"weight for id {idx} must be popcount {expected}, "
                    f"got {self.weights.get(idx)!r}"
                )
        for idx in self.reliabilities:
            if not 0 <= idx < block:
                raise DomainError(f"reliability id {idx!r} outside [0, {block})")

    @property
    def size(self) -> int:
        return len(self.indices)

    def min_weight(self) -> int:
        if not self.indices:
            raise DomainError("empty selection has no minimum weight")
        return min(self.weights[idx] for idx in self.indices)


@unique
class BoundKind(Enum):
    MAP_LOWER = "map_lower"
    SC_UNION_UPPER = "sc_union_upper"
    SC_EMPIRICAL = "sc_empirical"


@dataclass(frozen=True)
class ErrorBound:
    """A block-error probability bound or estimate.

    ``neg_log2`` is -log2 of the un-capped quantity (infinite for an
    exact zero, negative when a union-style sum exceeds one);
    ``log_exponent`` additionally stores log2(neg_log2) so that doubly
    small bounds survive even when ``neg_log2`` itself overflows.
    ``value`` is the probability view, capped into [0, 1].
    ``ci_halfwidth`` is the 95% confidence half-width and accompanies
    empirical estimates only.
    """

    kind: BoundKind
    value: float
    neg_log2: float
    log_exponent: Optional[float] = None
    ci_halfwidth: Optional[float] = None

    def __post_init__(self) -> None:
        if math.isnan(self.value) or math.isnan(self.neg_log2):
            raise DomainError("error bound fields must not be NaN")
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"value must lie in [0, 1], got {self.value!r}")
        if self.kind is BoundKind.SC_EMPIRICAL:
            if self.ci_halfwidth is None or self.ci_halfwidth < 0.0:
                raise DomainError("empirical bounds need a non-negative ci_halfwidth")
        elif self.ci_halfwidth is not None:
            raise DomainError("ci_halfwidth only accompanies empirical estimates")

    @classmethod
    def from_neg_log2(
        cls,
        kind: BoundKind,
        neg_log2: float,
        *,
        log_exponent: Optional[float] = None,
        ci_halfwidth: Optional[float] = None,
    ) -> "ErrorBound":
        if neg_log2 <= 0.0:
            value = 1.0
        elif math.isinf(neg_log2):
            value = 0.0
        else:
            value = _pow2(-neg_log2)
        if log_exponent is None and neg_log2 > 0.0 and not math.isinf(neg_log2):
            log_exponent = math.log2(neg_log2)
        return cls(
            kind=kind,
            value=value,
            neg_log2=neg_log2,
            log_exponent=log_exponent,
            ci_halfwidth=ci_halfwidth,
        )

    @classmethod
    def from_probability(
        cls,
        kind: BoundKind,
        probability: float,
        *,
        ci_halfwidth: Optional[float] = None,
    ) -> "ErrorBound":
        if not 0.0 <= probability <= 1.0:
            raise DomainError(f"probability must lie in [0, 1], got {probability!r}")
        neg_log2 = math.inf if probability == 0.0 else -math.log2(probability)
        log_exponent = math.log2(neg_log2) if 0.0 < neg_log2 < math.inf else None
        return cls(
            kind=kind,
            value=probability,
            neg_log2=neg_log2,
            log_exponent=log_exponent,
            ci_halfwidth=ci_halfwidth,
        )


def _pow2(x: float) -> float:
    try:
        return 2.0 ** x
    except OverflowError:
        return math.inf


def branch_sequence(idx: int, n: int) -> Tuple[Branch, ...]:
    """Splitting branches for a 0-based id: n bits, most significant first,
    1 mapped to plus and 0 to minus."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n!r}")
    if not 0 <= idx < (1 << n):
        raise DomainError(f"id {idx!r} outside [0, 2**{n})")
    return tuple(
        PLUS if (idx >> shift) & 1 else MINUS for shift in range(n - 1, -1, -1)
    )


def polar_select(reliabilities: Mapping[int, float], rate: float) -> IndexSelection:
    """Keep the ``ceil(2**n * rate)`` ids of largest L = -log2 Z.

    ``reliabilities`` must cover every id of a full block, i.e. have
    exactly the keys 0 .. 2**n - 1 for some n.  Ties break toward the
    smaller id.
    """
    _check_rate(rate)
    count = len(reliabilities)
    if count == 0 or count & (count - 1):
        raise DomainError(
            f"reliabilities must cover a full 2**n block, got {count} entries"
        )
    n = count.bit_length() - 1
    if set(reliabilities) != set(range(count)):
        raise DomainError("reliabilities must cover exactly the ids 0 .. 2**n - 1")
    for idx, level in reliabilities.items():
        if math.isnan(level):
            raise DomainError(f"reliability for id {idx} is NaN")
    size = _selection_size(n, rate)
    ranked = sorted(range(count), key=lambda i: (-reliabilities[i], i))
    chosen = frozenset(ranked[:size])
    return IndexSelection(
        n=n,
        rate=float(rate),
        indices=chosen,
        reliabilities={i: float(reliabilities[i]) for i in chosen},
        weights={i: i.bit_count() for i in chosen},
    )


def rm_select(n: int, rate: float) -> IndexSelection:
    """Keep the ``ceil(2**n * rate)`` ids of largest binary weight.

    Within the boundary weight class ties break toward the smaller id.
    """
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n!r}")
    if n > _MAX_TABLE_N:
        raise ResourceLimitError(
            f"rm_select builds a 2**{n} table; the cap is n = {_MAX_TABLE_N}"
        )
    _check_rate(rate)
    size = _selection_size(n, rate)
    ranked = sorted(range(1 << n), key=lambda i: (-i.bit_count(), i))
    chosen = frozenset(ranked[:size])
    return IndexSelection(
        n=n,
        rate=float(rate),
        indices=chosen,
        weights={i: i.bit_count() for i in chosen},
    )


def overlap_fraction(a: IndexSelection, b: IndexSelection) -> float:
    """|a ∩ b| normalized by the common selection size."""
    if a.n != b.n:
        raise DomainError(f"selections disagree on n: {a.n} vs {b.n}")
    if a.rate != b.rate:
        raise DomainError(f"selections disagree on rate: {a.rate} vs {b.rate}")
    return len(a.indices & b.indices) / a.size


def map_lower_bound(sel: IndexSelection, z_w: DualScaleValue) -> ErrorBound:
    """Lower bound on optimal-decoding block error from the lightest row.

    With w* the minimum weight over the selection and L = -log2 z_w, the
    bound is 2**(-2**(w* + 1 + log2 L) - 1).  The whole computation stays
    in the log2(-log2) coordinate so that the doubly-exponentially small
    result never has to be materialized as a float.
    """
    if z_w.is_zero or z_w.is_one:
        raise DomainError("z_w must lie strictly inside (0, 1)")
    wstar = sel.min_weight()
    exponent = wstar + 1.0 + LogExponent.of(z_w).value
    power = _pow2(exponent)
    neg_log2 = power + 1.0
    # log2(2**e + 1) without overflow: e + log1p(2**-e)/ln2 once 2**e is
    # large, and the direct form when it is small.
    if power >= 1.0:
        log_exponent = exponent + math.log1p(_pow2(-exponent)) / math.log(2.0)
    else:
        log_exponent = math.log2(neg_log2)
    return ErrorBound.from_neg_log2(
        BoundKind.MAP_LOWER, neg_log2, log_exponent=log_exponent
    )


def sc_union_bound(
    sel: IndexSelection, z_values: Mapping[int, DualScaleValue]
) -> ErrorBound:
    """Sum of selected reliabilities as an upper bound on block error.

    The sum accumulates in the -log2 domain against the largest term, so
    doubly small contributions combine without underflow.  The raw sum
    may exceed one; ``value`` caps the probability view while
    ``neg_log2`` keeps the uncapped total.
    """
    levels = []
    for idx in sorted(sel.indices):
        try:
            levels.append(z_values[idx].neg_log2())
        except KeyError:
            raise DomainError(f"z_values missing selected id {idx}") from None
    finite = [lv for lv in levels if not math.isinf(lv)]
    if not finite:
        return ErrorBound.from_neg_log2(BoundKind.SC_UNION_UPPER, math.inf)
    base = min(finite)
    total = math.fsum(_pow2(base - lv) for lv in finite)
    neg_log2 = base - math.log2(total)
    return ErrorBound.from_neg_log2(BoundKind.SC_UNION_UPPER, neg_log2)


def _known_leaves(mask: np.ndarray, n: int) -> np.ndarray:
    """Per-trial knownness of each synthesized channel, ids in order.

    ``mask`` is (trials, 2**n) boolean, True where the channel output was
    not erased.  One split level combines adjacent pairs: the minus
    branch needs both halves known, the plus branch either.  Splitting
    on the most significant id bit first lays the leaves out in id
    order.
    """
    blocks = [mask]
    for _ in range(n):
        next_blocks = []
        for blk in blocks:
            a = blk[:, 0::2]
            b = blk[:, 1::2]
            next_blocks.append(a & b)
            next_blocks.append(a | b)
        blocks = next_blocks
    return np.concatenate(blocks, axis=1)


def sc_simulate_bec(
    sel: IndexSelection, eps: float, trials: int, seed: int
) -> ErrorBound:
    """Estimate successive-cancellation block error on an erasure channel.

    Transmits the all-zero codeword with unselected rows frozen to zero.
    A selected row whose synthesized observation is erased is resolved by
    a fair coin; the block errs when any resolved coin disagrees with the
    transmitted zero.  Returns the empirical rate with a 95% confidence
    half-width.
    """
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials!r}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    block = 1 << sel.n
    info = sorted(sel.indices)
    errors = 0
    for index, size in iter_chunks(trials, chunk=SC_CHUNK_TRIALS):
        gen = chunk_generator(seed, index)
        uniforms = gen.random((SC_CHUNK_TRIALS, block))
        coins = gen.integers(0, 2, size=(SC_CHUNK_TRIALS, len(info)), dtype=np.uint8)
        known = _known_leaves(uniforms[:size] >= eps, sel.n)
        wrong = (~known[:, info]) & (coins[:size] == 1)
        errors += int(np.count_nonzero(wrong.any(axis=1)))
    p_hat = errors / trials
    sigma = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return ErrorBound.from_probability(
        BoundKind.SC_EMPIRICAL, p_hat, ci_halfwidth=1.96 * sigma
    )
