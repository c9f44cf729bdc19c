"""Per-spread bias quantification via the entropy of the cover distribution.

A spread that carries no information about which side covers has a
cover distribution near (0.5, 0.5) and binary entropy near 1 bit; a
strongly biased spread has entropy near 0. Spreads whose entropy falls
strictly below a threshold are considered biased and eligible for
wagering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .data import SpreadBucket
from .density import DEFAULT_BANDWIDTH, OutcomeGrid, estimate_density, home_cover_probability

DEFAULT_ENTROPY_THRESHOLD = 0.95


def binary_entropy(p: float) -> float:
    """Shannon entropy in bits of a two-outcome distribution (p, 1 - p).

    Uses the convention 0 * log2(0) = 0, so the endpoints evaluate to
    exactly 0.0. Raises ValueError outside [0, 1].
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    h = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            h -= q * math.log2(q)
    return h


@dataclass(frozen=True)
class SpreadBias:
    """Cover probabilities and entropy for one valid spread."""

    spread: float
    p_home: float
    p_visitor: float
    entropy_bits: float
    n_train: int


@dataclass(frozen=True)
class BiasProfile:
    """Per-spread bias entries, sorted by spread, plus the entropy threshold."""

    entries: tuple[SpreadBias, ...]
    threshold: float = DEFAULT_ENTROPY_THRESHOLD

    def __post_init__(self):
        spreads = [e.spread for e in self.entries]
        if len(set(spreads)) != len(spreads):
            raise ValueError("profile entries must have unique spreads")


def build_profile(
    buckets: Iterable[SpreadBucket],
    bandwidth: float = DEFAULT_BANDWIDTH,
    grid: OutcomeGrid = OutcomeGrid(),
    threshold: float = DEFAULT_ENTROPY_THRESHOLD,
    kernel: str = "gaussian",
) -> BiasProfile:
    """Estimate one SpreadBias per bucket from its outcome density.

    For each bucket: estimate the outcome density, integrate it up to the
    bucket's spread to get the home cover probability, and take the binary
    entropy of that probability.
    """
    entries = []
    for bucket in sorted(buckets, key=lambda b: b.spread):
        density = estimate_density(bucket.outcomes, bandwidth, grid, kernel)
        p_home = home_cover_probability(density, bucket.spread)
        entries.append(
            SpreadBias(
                spread=bucket.spread,
                p_home=p_home,
                p_visitor=1.0 - p_home,
                entropy_bits=binary_entropy(p_home),
                n_train=len(bucket),
            )
        )
    return BiasProfile(tuple(entries), threshold)


def _bias_rank(entry: SpreadBias) -> tuple[float, float, float]:
    # Deterministic ordering: entropy ascending, ties by |spread| then spread.
    return (entry.entropy_bits, abs(entry.spread), entry.spread)


def min_entropy_spread(profile: BiasProfile) -> SpreadBias:
    """The most biased entry: smallest entropy, ties by |spread| then spread."""
    if not profile.entries:
        raise ValueError("profile has no entries")
    return min(profile.entries, key=_bias_rank)


def k_lowest_spreads(profile: BiasProfile, k: int | None = None) -> tuple[SpreadBias, ...]:
    """The k most biased entries, ordered by ascending entropy.

    With ``k`` unset, threshold mode applies: k is the number of entries
    whose entropy falls strictly below ``profile.threshold`` (possibly
    zero). An explicit ``k`` must lie in [1, number of entries].
    """
    if not profile.entries:
        raise ValueError("profile has no entries")
    ranked = sorted(profile.entries, key=_bias_rank)
    if k is None:
        k = sum(1 for e in profile.entries if e.entropy_bits < profile.threshold)
    elif not 1 <= k <= len(ranked):
        raise ValueError(f"k must lie in [1, {len(ranked)}], got {k}")
    return tuple(ranked[:k])
