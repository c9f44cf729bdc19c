"""Shared builders for synthetic game datasets."""

from __future__ import annotations

import datetime as dt
import math
import os
from pathlib import Path

import numpy as np
import pytest

from spreadbias import Dataset, GameRecord, deduplicate, parse_games

#: Environment variable pointing at the historical 648-game CSV used by
#: the golden reproduction tests. Absent => those tests skip.
GOLDEN_DATASET_ENV = "SPREADBIAS_DATASET"


def make_record(
    date="2016-10-02",
    home_team="AAA",
    visitor_team="BBB",
    home_score=20,
    visitor_score=17,
    spread=-3.0,
) -> GameRecord:
    return GameRecord(
        date=dt.date.fromisoformat(date),
        home_team=home_team,
        visitor_team=visitor_team,
        home_score=home_score,
        visitor_score=visitor_score,
        spread=spread,
    )


def synthetic_spread_dataset(
    spreads,
    n_per_spread,
    cover_probs=None,
    seed=7,
    start="2015-09-01",
    max_offset=12,
) -> Dataset:
    """Games whose home side covers each spread with a chosen probability.

    Outcomes are placed a uniform 1..max_offset integer steps on the
    covering or non-covering side of the spread, so half-point spreads
    never push and the outcome distribution is symmetric about the spread
    when the cover probability is 0.5.
    """
    cover_probs = cover_probs or {}
    rng = np.random.default_rng(seed)
    start_date = dt.date.fromisoformat(start)
    records = []
    i = 0
    for spread in spreads:
        p = cover_probs.get(spread, 0.5)
        for _ in range(n_per_spread):
            offset = int(rng.integers(1, max_offset + 1))
            if rng.random() < p:
                outcome = math.ceil(spread) - offset  # home covers: outcome < spread
            else:
                outcome = math.floor(spread) + offset  # visitor covers
            date = start_date + dt.timedelta(days=i)
            records.append(
                GameRecord(
                    date=date,
                    home_team=f"H{i % 32:02d}",
                    visitor_team=f"V{i % 31:02d}",
                    home_score=30,
                    visitor_score=30 + outcome,
                    spread=float(spread),
                )
            )
            i += 1
    return Dataset(tuple(records))


def dataset_csv_lines(dataset: Dataset) -> list[str]:
    lines = ["date,home_team,visitor_team,home_score,visitor_score,spread\n"]
    for r in dataset:
        lines.append(
            f"{r.date.isoformat()},{r.home_team},{r.visitor_team},"
            f"{r.home_score},{r.visitor_score},{r.spread}\n"
        )
    return lines


def write_dataset_csv(path: Path, dataset: Dataset) -> Path:
    path.write_text("".join(dataset_csv_lines(dataset)), encoding="utf-8")
    return path


@pytest.fixture
def golden_dataset():
    """The original 648-game dataset, when supplied via the environment."""
    path = os.environ.get(GOLDEN_DATASET_ENV)
    if not path or not Path(path).is_file():
        pytest.skip(
            f"golden dataset not available (set {GOLDEN_DATASET_ENV} to the "
            "648-game CSV to enable this reproduction test)"
        )
    with open(path, encoding="utf-8", newline="") as fh:
        return deduplicate(parse_games(fh))
