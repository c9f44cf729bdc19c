"""Game-record ingestion, validation, deduplication, and spread bucketing."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

REQUIRED_COLUMNS = (
    "date",
    "home_team",
    "visitor_team",
    "home_score",
    "visitor_score",
    "spread",
)

#: Lines starting with this prefix are treated as comments (run manifests
#: embedded in emitted CSVs use it) and skipped by the parser.
COMMENT_PREFIX = "#"


class SchemaError(ValueError):
    """The input table is missing its header or a required column."""


class ParseError(ValueError):
    """A row failed validation. Carries the 1-based file line number."""

    def __init__(self, line_num: int, message: str):
        super().__init__(f"line {line_num}: {message}")
        self.line_num = line_num


class DuplicateConflictError(ValueError):
    """Two rows share a game key but disagree on scores or spread."""

    def __init__(self, first: GameRecord, second: GameRecord):
        super().__init__(
            "conflicting duplicate for game "
            f"({first.date.isoformat()}, {first.home_team}, {first.visitor_team}): "
            f"kept {first} but also saw {second}"
        )
        self.first = first
        self.second = second


@dataclass(frozen=True)
class GameRecord:
    """One completed game with its closing spread.

    The spread is quoted on the (visitor - home) scale: negative values
    mean the home team is favored.
    """

    date: dt.date
    home_team: str
    visitor_team: str
    home_score: int
    visitor_score: int
    spread: float

    @property
    def outcome(self) -> int:
        """Final margin on the visitor-minus-home scale, in points."""
        return self.visitor_score - self.home_score

    @property
    def key(self) -> tuple[dt.date, str, str]:
        """Identity of the game: (date, home_team, visitor_team)."""
        return (self.date, self.home_team, self.visitor_team)


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of game records."""

    records: tuple[GameRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[GameRecord]:
        return iter(self.records)


@dataclass(frozen=True)
class SpreadBucket:
    """All observed outcomes for games quoted at one exact spread value."""

    spread: float
    outcomes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.outcomes)


def parse_games(source: Iterable[str]) -> Dataset:
    """Parse a delimited text stream of game rows into a Dataset.

    The stream must begin with a header naming the six required columns
    (``date,home_team,visitor_team,home_score,visitor_score,spread``) in
    any order; extra columns are ignored. Dates are ISO-8601; scores are
    non-negative integers; spreads are finite numbers, rounded to one
    decimal place on input because they are half-point market quotes.
    Blank lines and ``#`` comment lines are skipped. Row order is
    preserved.

    Raises SchemaError when the header is absent or incomplete, and
    ParseError (carrying the offending line number) for malformed rows.
    """
    numbered = [
        (n, line)
        for n, line in enumerate(source, start=1)
        if line.strip() and not line.lstrip().startswith(COMMENT_PREFIX)
    ]
    if not numbered:
        raise SchemaError("empty input: a header row is required")

    _, header_line = numbered[0]
    header = [name.strip() for name in next(csv.reader([header_line]))]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"missing required column(s): {', '.join(missing)}")
    col = {name: header.index(name) for name in REQUIRED_COLUMNS}

    records = []
    for line_num, line in numbered[1:]:
        fields = next(csv.reader([line]))
        if len(fields) != len(header):
            raise ParseError(
                line_num, f"expected {len(header)} fields, found {len(fields)}"
            )
        records.append(_parse_row(fields, col, line_num))
    return Dataset(tuple(records))


def _parse_row(fields: list[str], col: dict[str, int], line_num: int) -> GameRecord:
    raw = {name: fields[idx].strip() for name, idx in col.items()}

    try:
        date = dt.date.fromisoformat(raw["date"])
    except ValueError:
        raise ParseError(
            line_num, f"invalid date {raw['date']!r} (expected YYYY-MM-DD)"
        ) from None

    for team_field in ("home_team", "visitor_team"):
        if not raw[team_field]:
            raise ParseError(line_num, f"empty {team_field}")

    scores = {}
    for score_field in ("home_score", "visitor_score"):
        try:
            scores[score_field] = int(raw[score_field])
        except ValueError:
            raise ParseError(
                line_num, f"non-integer {score_field} {raw[score_field]!r}"
            ) from None
        if scores[score_field] < 0:
            raise ParseError(
                line_num, f"negative {score_field} {raw[score_field]!r}"
            )

    try:
        spread = float(raw["spread"])
    except ValueError:
        raise ParseError(line_num, f"non-numeric spread {raw['spread']!r}") from None
    if not math.isfinite(spread):
        raise ParseError(line_num, f"non-finite spread {raw['spread']!r}")

    return GameRecord(
        date=date,
        home_team=raw["home_team"],
        visitor_team=raw["visitor_team"],
        home_score=scores["home_score"],
        visitor_score=scores["visitor_score"],
        spread=round(spread, 1),
    )


def deduplicate(dataset: Dataset) -> Dataset:
    """Drop repeated games, keeping the first occurrence of each key.

    A repeat with identical payload is removed silently; a repeat whose
    scores or spread disagree with the kept record raises
    DuplicateConflictError rather than silently picking a winner.
    """
    seen: dict[tuple[dt.date, str, str], GameRecord] = {}
    kept = []
    for record in dataset:
        prior = seen.get(record.key)
        if prior is None:
            seen[record.key] = record
            kept.append(record)
        elif prior != record:
            raise DuplicateConflictError(prior, record)
    return Dataset(tuple(kept))


def bucket_by_spread(dataset: Dataset, min_samples: int) -> list[SpreadBucket]:
    """Group outcomes by exact spread value and keep well-sampled groups.

    Only spreads with at least ``min_samples`` outcomes are returned (the
    valid spreads); buckets are sorted by spread ascending.
    """
    if min_samples < 1:
        raise ValueError(f"min_samples must be >= 1, got {min_samples}")
    groups: dict[float, list[int]] = {}
    for record in dataset:
        groups.setdefault(record.spread, []).append(record.outcome)
    return [
        SpreadBucket(spread, tuple(outcomes))
        for spread, outcomes in sorted(groups.items())
        if len(outcomes) >= min_samples
    ]


def split_by_date(dataset: Dataset, cutoff_year: int) -> tuple[Dataset, Dataset]:
    """Split into (train, test) by game year: test is year >= cutoff_year."""
    train = []
    test = []
    for record in dataset:
        (test if record.date.year >= cutoff_year else train).append(record)
    return Dataset(tuple(train)), Dataset(tuple(test))
