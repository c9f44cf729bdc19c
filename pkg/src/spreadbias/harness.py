"""Backtest harnesses: repeated-random-holdout and date-split evaluations.

Two protocols are provided. The temporally-independent (TI) harness
ignores game dates: for each of N simulations it holds out a fixed number
of outcomes per valid spread, fits the bias profile on the rest, and lets
every strategy wager on the held-out games, aggregating mean and SEM of
the per-simulation win percentages. The temporally-dependent (TD) harness
splits once by date, fits on the past, wagers on the future, and sweeps
the k-lowest-entropy strategy over every k.

All randomness derives from named streams spawned off the config seed, so
a run is reproducible bit for bit and TI simulations could be evaluated in
any order (results are reduced in simulation-index order regardless).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .bias import (
    DEFAULT_ENTROPY_THRESHOLD,
    BiasProfile,
    build_profile,
    _bias_rank,
)
from .data import Dataset, GameRecord, SpreadBucket, bucket_by_spread, split_by_date
from .density import (
    DEFAULT_BANDWIDTH,
    DEFAULT_GRID_HI,
    DEFAULT_GRID_LO,
    KERNELS,
    OutcomeGrid,
)
from .models import (
    MODEL_K_LOWEST,
    MODEL_MAX_PROB,
    MODEL_MIN_ENTROPY,
    MODEL_RANDOM,
    AtsResult,
    predict_max_prob,
    predict_random,
    score_ats,
)

# Stream tags keep the holdout sampler and the coin-flip model on
# non-overlapping deterministic substreams of the config seed.
_HOLDOUT_STREAM = 0
_GUESS_STREAM = 1

#: Biased spreads re-selected from each simulation's own training data.
SELECTION_PER_SIMULATION = "per_simulation"
#: Biased spreads selected once from entropies averaged across simulations.
SELECTION_MEAN_ENTROPY = "mean_entropy"
SELECTION_SCOPES = (SELECTION_PER_SIMULATION, SELECTION_MEAN_ENTROPY)


def _stream(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(key))


@dataclass(frozen=True)
class TiConfig:
    """Settings for the repeated-random-holdout (date-agnostic) protocol."""

    n_simulations: int = 200
    holdout_per_spread: int = 10
    min_samples: int = 25
    entropy_threshold: float = DEFAULT_ENTROPY_THRESHOLD
    bandwidth: float = DEFAULT_BANDWIDTH
    grid_lo: int = DEFAULT_GRID_LO
    grid_hi: int = DEFAULT_GRID_HI
    kernel: str = "gaussian"
    seed: int = 0
    selection_scope: str = SELECTION_PER_SIMULATION

    def __post_init__(self):
        if self.n_simulations < 1:
            raise ValueError("n_simulations must be >= 1")
        if self.holdout_per_spread < 1:
            raise ValueError("holdout_per_spread must be >= 1")
        if self.min_samples - self.holdout_per_spread < 1:
            raise ValueError(
                "min_samples must exceed holdout_per_spread so each valid "
                "spread keeps at least one training sample"
            )
        if self.selection_scope not in SELECTION_SCOPES:
            raise ValueError(
                f"selection_scope must be one of {SELECTION_SCOPES}, "
                f"got {self.selection_scope!r}"
            )
        _validate_shared(self)

    def grid(self) -> OutcomeGrid:
        return OutcomeGrid(self.grid_lo, self.grid_hi)


@dataclass(frozen=True)
class TdConfig:
    """Settings for the one-shot date-split protocol."""

    cutoff_year: int = 2017
    min_samples: int = 15
    entropy_threshold: float = DEFAULT_ENTROPY_THRESHOLD
    bandwidth: float = DEFAULT_BANDWIDTH
    grid_lo: int = DEFAULT_GRID_LO
    grid_hi: int = DEFAULT_GRID_HI
    kernel: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        if self.min_samples < 1:
            raise ValueError("min_samples must be >= 1")
        _validate_shared(self)

    def grid(self) -> OutcomeGrid:
        return OutcomeGrid(self.grid_lo, self.grid_hi)


def _validate_shared(config) -> None:
    if not config.bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    if not 0.0 <= config.entropy_threshold <= 1.0:
        raise ValueError("entropy_threshold must lie in [0, 1]")
    if config.kernel not in KERNELS:
        raise ValueError(f"kernel must be one of {KERNELS}, got {config.kernel!r}")
    if config.grid_lo >= config.grid_hi:
        raise ValueError("grid_lo must be below grid_hi")
    if config.seed < 0:
        raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class ModelSummary:
    """Aggregate wagering performance for one strategy.

    ``ats_win_pct`` is the mean per-simulation win percentage under TI and
    the pooled win percentage under TD; it is None when the strategy placed
    no settled wagers. ``sem`` is the standard error across simulations
    (TI only). Pushes are excluded from ``n_test`` and from percentages.
    """

    model: str
    ats_win_pct: float | None
    sem: float | None
    n_test: int
    n_push: int
    n_wins: int
    k: int | None = None


@dataclass(frozen=True)
class EvaluationReport:
    """Full result of one harness run; serializable via ``to_dict``."""

    protocol: str
    config: dict
    valid_spreads: tuple[float, ...]
    n_test_samples: int
    models: tuple[ModelSummary, ...]
    profile: tuple[dict, ...]
    ksweep: tuple[dict, ...] | None = None
    selection_counts: dict[float, int] | None = None
    n_train_records: int | None = None
    n_test_records: int | None = None

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "config": dict(self.config),
            "valid_spreads": list(self.valid_spreads),
            "n_test_samples": self.n_test_samples,
            "models": [asdict(m) for m in self.models],
            "profile": [dict(row) for row in self.profile],
            "ksweep": None if self.ksweep is None else [dict(r) for r in self.ksweep],
            "selection_counts": None
            if self.selection_counts is None
            else {_spread_key(s): c for s, c in sorted(self.selection_counts.items())},
            "n_train_records": self.n_train_records,
            "n_test_records": self.n_test_records,
        }


def _spread_key(spread: float) -> str:
    return f"{spread:g}"


class _Tally:
    """Win/loss/push counter with push-excluded percentage."""

    __slots__ = ("wins", "losses", "pushes")

    def __init__(self):
        self.wins = 0
        self.losses = 0
        self.pushes = 0

    def add(self, result: AtsResult) -> None:
        if result is AtsResult.WIN:
            self.wins += 1
        elif result is AtsResult.LOSS:
            self.losses += 1
        else:
            self.pushes += 1

    def merge(self, other: _Tally) -> None:
        self.wins += other.wins
        self.losses += other.losses
        self.pushes += other.pushes

    @property
    def settled(self) -> int:
        return self.wins + self.losses

    @property
    def pct(self) -> float | None:
        if self.settled == 0:
            return None
        return 100.0 * self.wins / self.settled


def summarize(per_simulation_win_pcts: Sequence[float]) -> tuple[float, float | None]:
    """Mean and standard error of per-simulation win percentages.

    The SEM uses the n-1 sample standard deviation over sqrt(n); with a
    single value it is undefined and reported as None.
    """
    values = list(per_simulation_win_pcts)
    if not values:
        raise ValueError("no values to summarize")
    mean = float(np.mean(values))
    if len(values) == 1:
        return mean, None
    return mean, float(np.std(values, ddof=1) / math.sqrt(len(values)))


def _ranked_indices(profile: BiasProfile) -> list[int]:
    return sorted(range(len(profile.entries)), key=lambda j: _bias_rank(profile.entries[j]))


def _threshold_k(profile: BiasProfile) -> int:
    return sum(1 for e in profile.entries if e.entropy_bits < profile.threshold)


def run_ti(dataset: Dataset, config: TiConfig) -> EvaluationReport:
    """Monte Carlo backtest with repeated per-spread random holdouts.

    Valid spreads are found once on the full dataset. Each simulation then
    holds out ``holdout_per_spread`` outcomes per valid spread (sampled
    without replacement from a stream keyed on seed, simulation index, and
    spread index), fits the bias profile on the remainder, and settles
    every strategy's wagers on the held-out outcomes. Win percentages are
    aggregated across simulations as mean and SEM.
    """
    grid = config.grid()
    buckets = bucket_by_spread(dataset, config.min_samples)
    if not buckets:
        raise ValueError(
            f"no spread has at least min_samples={config.min_samples} outcomes"
        )
    for bucket in buckets:
        if len(bucket) < config.holdout_per_spread + 1:
            raise ValueError(
                f"spread {bucket.spread:g} has {len(bucket)} samples, too few "
                f"to hold out {config.holdout_per_spread} and still train"
            )
    spreads = [b.spread for b in buckets]
    n_spreads = len(buckets)
    bucket_arrays = [np.asarray(b.outcomes, dtype=np.int64) for b in buckets]

    # Pass 1: per-simulation holdout splits and training profiles.
    sim_profiles: list[BiasProfile] = []
    sim_tests: list[list[np.ndarray]] = []
    for sim in range(config.n_simulations):
        train_buckets = []
        test_sets = []
        for j, outcomes in enumerate(bucket_arrays):
            rng = _stream(config.seed, _HOLDOUT_STREAM, sim, j)
            test_idx = np.sort(
                rng.choice(outcomes.size, size=config.holdout_per_spread, replace=False)
            )
            mask = np.zeros(outcomes.size, dtype=bool)
            mask[test_idx] = True
            train_buckets.append(
                SpreadBucket(spreads[j], tuple(int(v) for v in outcomes[~mask]))
            )
            test_sets.append(outcomes[mask])
        sim_profiles.append(
            build_profile(
                train_buckets, config.bandwidth, grid, config.entropy_threshold, config.kernel
            )
        )
        sim_tests.append(test_sets)

    # Optional global selection from across-simulation mean entropies.
    global_min_idx: int | None = None
    global_selected: list[int] | None = None
    if config.selection_scope == SELECTION_MEAN_ENTROPY:
        mean_entropy = [
            float(np.mean([p.entries[j].entropy_bits for p in sim_profiles]))
            for j in range(n_spreads)
        ]
        order = sorted(
            range(n_spreads), key=lambda j: (mean_entropy[j], abs(spreads[j]), spreads[j])
        )
        k_global = sum(1 for e in mean_entropy if e < config.entropy_threshold)
        global_min_idx = order[0]
        global_selected = order[:k_global]

    # Pass 2: settle wagers per simulation.
    model_names = (MODEL_RANDOM, MODEL_MAX_PROB, MODEL_MIN_ENTROPY, MODEL_K_LOWEST)
    totals = {name: _Tally() for name in model_names}
    sim_pcts: dict[str, list[float]] = {name: [] for name in model_names}
    selection_counter: Counter[float] = Counter()
    ks: list[int] = []

    for sim in range(config.n_simulations):
        profile = sim_profiles[sim]
        tests = sim_tests[sim]
        tally = {name: _Tally() for name in model_names}

        guess_rng = _stream(config.seed, _GUESS_STREAM, sim)
        for j, entry in enumerate(profile.entries):
            mp_decision = predict_max_prob(entry)
            for outcome in tests[j].tolist():
                tally[MODEL_RANDOM].add(
                    score_ats(predict_random(guess_rng), outcome, entry.spread)
                )
                tally[MODEL_MAX_PROB].add(score_ats(mp_decision, outcome, entry.spread))

        if config.selection_scope == SELECTION_MEAN_ENTROPY:
            min_idx = global_min_idx
            selected = global_selected
        else:
            order = _ranked_indices(profile)
            min_idx = order[0]
            selected = order[: _threshold_k(profile)]

        entry = profile.entries[min_idx]
        decision = predict_max_prob(entry)
        for outcome in tests[min_idx].tolist():
            tally[MODEL_MIN_ENTROPY].add(score_ats(decision, outcome, entry.spread))

        for j in selected:
            entry = profile.entries[j]
            decision = predict_max_prob(entry)
            for outcome in tests[j].tolist():
                tally[MODEL_K_LOWEST].add(score_ats(decision, outcome, entry.spread))
        ks.append(len(selected))
        selection_counter.update(spreads[j] for j in selected)

        for name in model_names:
            totals[name].merge(tally[name])
            pct = tally[name].pct
            if pct is not None:
                sim_pcts[name].append(pct)

    summaries = []
    for name in model_names:
        pcts = sim_pcts[name]
        mean, sem = summarize(pcts) if pcts else (None, None)
        k: int | None = None
        if name == MODEL_MIN_ENTROPY:
            k = 1
        elif name == MODEL_K_LOWEST:
            k = _modal_k(ks)
        summaries.append(
            ModelSummary(
                model=name,
                ats_win_pct=mean,
                sem=sem,
                n_test=totals[name].settled,
                n_push=totals[name].pushes,
                n_wins=totals[name].wins,
                k=k,
            )
        )

    profile_rows = []
    for j in range(n_spreads):
        entropies = [p.entries[j].entropy_bits for p in sim_profiles]
        p_homes = [p.entries[j].p_home for p in sim_profiles]
        profile_rows.append(
            {
                "spread": spreads[j],
                "p_home": float(np.mean(p_homes)),
                "entropy_bits": float(np.mean(entropies)),
                "entropy_sd": float(np.std(entropies, ddof=1)) if len(entropies) > 1 else None,
                "n_train": len(buckets[j]) - config.holdout_per_spread,
            }
        )

    return EvaluationReport(
        protocol="ti",
        config=asdict(config),
        valid_spreads=tuple(spreads),
        n_test_samples=config.n_simulations * config.holdout_per_spread * n_spreads,
        models=tuple(summaries),
        profile=tuple(profile_rows),
        selection_counts=dict(selection_counter),
    )


def _modal_k(ks: Iterable[int]) -> int:
    counts = Counter(ks)
    return min(counts, key=lambda k: (-counts[k], k))


def sweep_k(
    profile: BiasProfile, records: Sequence[GameRecord]
) -> list[dict]:
    """Settle the k-lowest-entropy strategy for every k from 1 to all spreads.

    ``records`` are the test games, already restricted to the profile's
    spreads. Each row carries the pooled win percentage and settled count;
    the row whose k equals the threshold-mode selection is flagged.
    """
    by_spread: dict[float, list[GameRecord]] = {}
    for record in records:
        by_spread.setdefault(record.spread, []).append(record)

    ranked = sorted(profile.entries, key=_bias_rank)
    k_threshold = _threshold_k(profile)
    rows = []
    tally = _Tally()
    for k, entry in enumerate(ranked, start=1):
        decision = predict_max_prob(entry)
        for record in by_spread.get(entry.spread, []):
            tally.add(score_ats(decision, record.outcome, record.spread))
        rows.append(
            {
                "k": k,
                "ats_win_pct": tally.pct,
                "n_wins": tally.wins,
                "n_test": tally.settled,
                "n_push": tally.pushes,
                "threshold_selected": k == k_threshold,
            }
        )
    return rows


def run_td(dataset: Dataset, config: TdConfig) -> EvaluationReport:
    """One-shot backtest: train strictly before the cutoff year, test at it.

    Valid spreads are determined from training bucket sizes only; test
    games at other spreads are dropped. All strategies are settled once,
    and the full k sweep is included.
    """
    train, test = split_by_date(dataset, config.cutoff_year)
    if not train.records:
        raise ValueError(f"no training games before year {config.cutoff_year}")
    if not test.records:
        raise ValueError(f"no test games in year {config.cutoff_year} or later")

    buckets = bucket_by_spread(train, config.min_samples)
    if not buckets:
        raise ValueError(
            f"no training spread has at least min_samples={config.min_samples} outcomes"
        )
    profile = build_profile(
        buckets, config.bandwidth, config.grid(), config.entropy_threshold, config.kernel
    )
    spreads = [e.spread for e in profile.entries]
    valid = set(spreads)
    test_records = sorted(
        (r for r in test if r.spread in valid),
        key=lambda r: (r.spread, r.date, r.home_team, r.visitor_team),
    )

    entry_by_spread = {e.spread: e for e in profile.entries}
    random_tally = _Tally()
    max_prob_tally = _Tally()
    guess_rng = _stream(config.seed, _GUESS_STREAM)
    for record in test_records:
        entry = entry_by_spread[record.spread]
        random_tally.add(
            score_ats(predict_random(guess_rng), record.outcome, record.spread)
        )
        max_prob_tally.add(
            score_ats(predict_max_prob(entry), record.outcome, record.spread)
        )

    rows = sweep_k(profile, test_records)
    k_threshold = _threshold_k(profile)
    min_entropy_row = rows[0]
    if k_threshold >= 1:
        k_lowest_row = rows[k_threshold - 1]
    else:
        k_lowest_row = {"ats_win_pct": None, "n_wins": 0, "n_test": 0, "n_push": 0}

    selected = sorted(e.spread for e in profile.entries if e.entropy_bits < profile.threshold)
    summaries = (
        ModelSummary(
            MODEL_RANDOM, random_tally.pct, None,
            random_tally.settled, random_tally.pushes, random_tally.wins,
        ),
        ModelSummary(
            MODEL_MAX_PROB, max_prob_tally.pct, None,
            max_prob_tally.settled, max_prob_tally.pushes, max_prob_tally.wins,
        ),
        ModelSummary(
            MODEL_MIN_ENTROPY, min_entropy_row["ats_win_pct"], None,
            min_entropy_row["n_test"], min_entropy_row["n_push"], min_entropy_row["n_wins"],
            k=1,
        ),
        ModelSummary(
            MODEL_K_LOWEST, k_lowest_row["ats_win_pct"], None,
            k_lowest_row["n_test"], k_lowest_row["n_push"], k_lowest_row["n_wins"],
            k=k_threshold,
        ),
    )

    profile_rows = tuple(
        {
            "spread": e.spread,
            "p_home": e.p_home,
            "entropy_bits": e.entropy_bits,
            "n_train": e.n_train,
        }
        for e in profile.entries
    )

    return EvaluationReport(
        protocol="td",
        config=asdict(config),
        valid_spreads=tuple(spreads),
        n_test_samples=len(test_records),
        models=summaries,
        profile=profile_rows,
        ksweep=tuple(rows),
        selection_counts={s: 1 for s in selected},
        n_train_records=len(train),
        n_test_records=len(test),
    )
