"""Oddsmaker-bias detection and against-the-spread wagering backtests.

The package estimates per-spread outcome densities from historical game
results, quantifies how much a spread leaks about the final margin via the
Shannon entropy of its cover distribution, and backtests four wagering
strategies (random guess, maximum probability, minimum entropy, k-lowest
entropy) under both repeated-random-holdout and date-split protocols.
"""

from .bias import (
    DEFAULT_ENTROPY_THRESHOLD,
    BiasProfile,
    SpreadBias,
    binary_entropy,
    build_profile,
    k_lowest_spreads,
    min_entropy_spread,
)
from .data import (
    Dataset,
    DuplicateConflictError,
    GameRecord,
    ParseError,
    SchemaError,
    SpreadBucket,
    bucket_by_spread,
    deduplicate,
    parse_games,
    split_by_date,
)
from .density import (
    DEFAULT_BANDWIDTH,
    KERNELS,
    OutcomeDensity,
    OutcomeGrid,
    estimate_density,
    home_cover_probability,
)
from .harness import (
    EvaluationReport,
    ModelSummary,
    TdConfig,
    TiConfig,
    run_td,
    run_ti,
    summarize,
    sweep_k,
)
from .models import (
    AtsResult,
    Decision,
    Wager,
    predict_k_lowest,
    predict_max_prob,
    predict_min_entropy,
    predict_random,
    score_ats,
)

__version__ = "0.1.0"

__all__ = [
    "AtsResult",
    "BiasProfile",
    "Dataset",
    "Decision",
    "DuplicateConflictError",
    "EvaluationReport",
    "GameRecord",
    "ModelSummary",
    "OutcomeDensity",
    "OutcomeGrid",
    "ParseError",
    "SchemaError",
    "SpreadBias",
    "SpreadBucket",
    "TdConfig",
    "TiConfig",
    "Wager",
    "DEFAULT_BANDWIDTH",
    "DEFAULT_ENTROPY_THRESHOLD",
    "KERNELS",
    "binary_entropy",
    "bucket_by_spread",
    "build_profile",
    "deduplicate",
    "estimate_density",
    "home_cover_probability",
    "k_lowest_spreads",
    "min_entropy_spread",
    "parse_games",
    "predict_k_lowest",
    "predict_max_prob",
    "predict_min_entropy",
    "predict_random",
    "run_td",
    "run_ti",
    "score_ats",
    "split_by_date",
    "summarize",
    "sweep_k",
]
