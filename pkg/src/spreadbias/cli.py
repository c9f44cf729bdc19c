"""Command-line surface: ingest data, emit bias profiles, run backtests.

Subcommands: ``ingest``, ``profile``, ``simulate-ti``, ``backtest-td``.
Every output file embeds a run manifest (command, resolved config, input
digest, tool version, timestamp): JSON reports carry it under a
``manifest`` key and CSV files as a leading ``#`` comment line. Option
precedence is CLI flag, then ``--config`` file entry, then built-in
default.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import statistics
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bias import build_profile
from .data import (
    Dataset,
    DuplicateConflictError,
    ParseError,
    SchemaError,
    bucket_by_spread,
    deduplicate,
    parse_games,
)
from .density import KERNELS, estimate_density
from .harness import EvaluationReport, TdConfig, TiConfig, run_td, run_ti
from .models import MODEL_K_LOWEST, MODEL_MAX_PROB, MODEL_MIN_ENTROPY, MODEL_RANDOM

MODEL_LABELS = {MODEL_RANDOM: "Random", MODEL_MAX_PROB: "Max-Prob"}

# Shared tuning options and the type each parses to, in both the CLI
# flags and the --config file.
_OPTION_TYPES = {
    "seed": int,
    "min_samples": int,
    "holdout": int,
    "simulations": int,
    "entropy_threshold": float,
    "bandwidth": float,
    "grid_lo": int,
    "grid_hi": int,
    "cutoff_year": int,
    "kernel": str,
}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--input", required=True, help="input games CSV")
    shared.add_argument("--out-dir", default="out", help="directory for output files")
    shared.add_argument("--config", help="flat key=value config file")
    shared.add_argument("--seed", type=int, help="random seed (default 0)")
    shared.add_argument("--min-samples", type=int, help="min outcomes for a valid spread")
    shared.add_argument("--holdout", type=int, help="held-out outcomes per spread (TI)")
    shared.add_argument("--simulations", type=int, help="number of TI simulations")
    shared.add_argument("--entropy-threshold", type=float, help="bias threshold in bits")
    shared.add_argument("--bandwidth", type=float, help="kernel width in points")
    shared.add_argument("--grid-lo", type=int, help="lower outcome grid bound")
    shared.add_argument("--grid-hi", type=int, help="upper outcome grid bound")
    shared.add_argument("--cutoff-year", type=int, help="first test year (TD)")
    shared.add_argument("--kernel", choices=KERNELS, help="kernel shape")

    parser = argparse.ArgumentParser(
        prog="spreadbias",
        description="Detect oddsmaker bias in point-spread data and backtest "
        "against-the-spread wagering strategies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser(
        "ingest", parents=[shared],
        help="parse, validate, and deduplicate a games file",
    )
    sub.add_parser(
        "profile", parents=[shared],
        help="emit the per-spread bias profile plus histogram/density tables",
    )
    sub.add_parser(
        "simulate-ti", parents=[shared],
        help="run the repeated-random-holdout Monte Carlo evaluation",
    )
    sub.add_parser(
        "backtest-td", parents=[shared],
        help="run the date-split backtest with the full k sweep",
    )
    return parser


def _read_config_file(path: str) -> dict:
    values = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _OPTION_TYPES:
            raise ValueError(f"{path}:{n}: unknown option {key!r}")
        values[key] = _OPTION_TYPES[key](raw.strip())
    return values


def _resolve_options(args: argparse.Namespace) -> dict:
    """Merge CLI flags over config-file entries over nothing (defaults
    come from the harness config dataclasses)."""
    file_values = _read_config_file(args.config) if args.config else {}
    resolved = dict(file_values)
    for dest in _OPTION_TYPES:
        cli_value = getattr(args, dest, None)
        if cli_value is not None:
            resolved[dest] = cli_value
    return resolved


def _ti_config(options: dict) -> TiConfig:
    kwargs = {}
    rename = {"holdout": "holdout_per_spread", "simulations": "n_simulations"}
    for key, value in options.items():
        if key == "cutoff_year":
            continue
        kwargs[rename.get(key, key)] = value
    return TiConfig(**kwargs)


def _td_config(options: dict) -> TdConfig:
    kwargs = {k: v for k, v in options.items() if k not in ("holdout", "simulations")}
    return TdConfig(**kwargs)


def _manifest(command: str, config: dict, input_path: str) -> dict:
    digest = hashlib.sha256(Path(input_path).read_bytes()).hexdigest()
    return {
        "command": command,
        "config": config,
        "input": str(input_path),
        "input_digest": digest,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _load_dataset(path: str) -> tuple[Dataset, Dataset]:
    """Return (raw, deduplicated) datasets from a games file."""
    with open(path, encoding="utf-8", newline="") as fh:
        raw = parse_games(fh)
    return raw, deduplicate(raw)


def _write_csv(path: Path, manifest: dict, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# manifest " + json.dumps(manifest, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_report(path: Path, manifest: dict, report: EvaluationReport) -> None:
    payload = {"manifest": manifest, **report.to_dict()}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _fmt_pct(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def _spread_tag(spread: float) -> str:
    return f"{spread:.1f}"


def _summary_rows(report: EvaluationReport) -> list[list[str]]:
    """Flat model/percent/SEM/sample-count rows, one strategy per line; the
    TD k sweep is expanded into the numbered k-lowest rows."""
    rows = []
    for summary in report.models:
        if summary.model in MODEL_LABELS:
            label = MODEL_LABELS[summary.model]
        elif summary.model == MODEL_MIN_ENTROPY:
            label = "Min-Ent"
        else:
            label = f"{summary.k}-Lowest Ent"
        if summary.model == MODEL_K_LOWEST and report.protocol == "td":
            continue  # expanded from the sweep below
        rows.append(
            [label, _fmt_pct(summary.ats_win_pct), _fmt_pct(summary.sem), str(summary.n_test)]
        )
    if report.ksweep:
        for row in report.ksweep:
            if row["k"] == 1:
                continue  # already present as Min-Ent
            rows.append(
                [
                    f"{row['k']}-Lowest Ent",
                    _fmt_pct(row["ats_win_pct"]),
                    "",
                    str(row["n_test"]),
                ]
            )
    return rows


def _profile_rows(report: EvaluationReport) -> tuple[list[str], list[list[str]]]:
    has_sd = any("entropy_sd" in row for row in report.profile)
    header = ["spread", "p_home", "entropy_bits"] + (["entropy_sd"] if has_sd else []) + ["n_train"]
    rows = []
    for row in report.profile:
        out = [f"{row['spread']:g}", repr(row["p_home"]), repr(row["entropy_bits"])]
        if has_sd:
            sd = row.get("entropy_sd")
            out.append("" if sd is None else repr(sd))
        out.append(str(row["n_train"]))
        rows.append(out)
    return header, rows


def cmd_ingest(args: argparse.Namespace, options: dict) -> int:
    raw, unique = _load_dataset(args.input)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = _manifest("ingest", dict(options), args.input)

    _write_csv(
        out_dir / "dataset.csv",
        manifest,
        ["date", "home_team", "visitor_team", "home_score", "visitor_score", "spread"],
        (
            [
                r.date.isoformat(),
                r.home_team,
                r.visitor_team,
                str(r.home_score),
                str(r.visitor_score),
                _spread_tag(r.spread),
            ]
            for r in unique
        ),
    )
    print(f"{len(raw)} rows, {len(unique)} unique ({len(raw) - len(unique)} duplicates removed)")
    if len(unique):
        mean_spread = statistics.fmean(r.spread for r in unique)
        print(f"spread mean: {mean_spread:.2f}")
    print(f"wrote {out_dir / 'dataset.csv'}")
    return 0


def cmd_profile(args: argparse.Namespace, options: dict) -> int:
    _, dataset = _load_dataset(args.input)
    options = dict(options)
    options.setdefault("min_samples", 25)  # match the holdout protocol's default
    config = _td_config({k: v for k, v in options.items() if k != "cutoff_year"})
    buckets = bucket_by_spread(dataset, config.min_samples)
    if not buckets:
        largest = max((len(v) for v in _spread_counts(dataset).values()), default=0)
        print(
            f"error: no spread has {config.min_samples} samples "
            f"(largest group has {largest}); lower --min-samples",
            file=sys.stderr,
        )
        return 1

    profile = build_profile(
        buckets, config.bandwidth, config.grid(), config.entropy_threshold, config.kernel
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config_echo = {k: v for k, v in asdict(config).items() if k != "cutoff_year"}
    manifest = _manifest("profile", config_echo, args.input)

    _write_csv(
        out_dir / "profile.csv",
        manifest,
        ["spread", "p_home", "entropy_bits", "n_train"],
        (
            [f"{e.spread:g}", repr(e.p_home), repr(e.entropy_bits), str(e.n_train)]
            for e in profile.entries
        ),
    )
    for bucket in buckets:
        tag = _spread_tag(bucket.spread)
        counts: dict[int, int] = {}
        for outcome in bucket.outcomes:
            counts[outcome] = counts.get(outcome, 0) + 1
        _write_csv(
            out_dir / f"hist_{tag}.csv",
            manifest,
            ["outcome", "count"],
            ([str(v), str(c)] for v, c in sorted(counts.items())),
        )
        density = estimate_density(bucket.outcomes, config.bandwidth, config.grid(), config.kernel)
        _write_csv(
            out_dir / f"pdf_{tag}.csv",
            manifest,
            ["grid_point", "mass"],
            (
                [str(int(p)), repr(float(m))]
                for p, m in zip(density.grid.points, density.mass)
            ),
        )
    for entry in profile.entries:
        print(
            f"spread {entry.spread:+.1f}: p_home={entry.p_home:.4f} "
            f"entropy={entry.entropy_bits:.4f} bits (n={entry.n_train})"
        )
    print(f"wrote {len(buckets)} histogram/density pairs to {out_dir}")
    return 0


def _spread_counts(dataset: Dataset) -> dict[float, list[int]]:
    groups: dict[float, list[int]] = {}
    for record in dataset:
        groups.setdefault(record.spread, []).append(record.outcome)
    return groups


def _run_and_write(command: str, report: EvaluationReport, args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = _manifest(command, dict(report.config), args.input)
    _write_report(out_dir / "report.json", manifest, report)
    _write_csv(
        out_dir / "summary.csv",
        manifest,
        ["model", "percent_ats_win", "sem", "n_test_samples"],
        _summary_rows(report),
    )
    header, rows = _profile_rows(report)
    _write_csv(out_dir / "profile.csv", manifest, header, rows)

    for row in _summary_rows(report):
        label, pct, sem, n_test = row
        line = f"{label}: {pct or 'no wagers'}"
        if sem:
            line += f" +/- {sem} SEM"
        line += f" (n={n_test})"
        print(line)
    print(f"wrote report.json, summary.csv, profile.csv to {out_dir}")
    return 0


def cmd_simulate_ti(args: argparse.Namespace, options: dict) -> int:
    _, dataset = _load_dataset(args.input)
    config = _ti_config(options)
    report = run_ti(dataset, config)
    return _run_and_write("simulate-ti", report, args)


def cmd_backtest_td(args: argparse.Namespace, options: dict) -> int:
    _, dataset = _load_dataset(args.input)
    config = _td_config(options)
    report = run_td(dataset, config)
    return _run_and_write("backtest-td", report, args)


_COMMANDS = {
    "ingest": cmd_ingest,
    "profile": cmd_profile,
    "simulate-ti": cmd_simulate_ti,
    "backtest-td": cmd_backtest_td,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        options = _resolve_options(args)
        return _COMMANDS[args.command](args, options)
    except (SchemaError, ParseError, DuplicateConflictError) as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
