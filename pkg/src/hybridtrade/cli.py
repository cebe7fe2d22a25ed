"""Command-line front end: rank, backtest, grid, decompose, hist."""

from __future__ import annotations

import argparse
import contextlib
import csv
import datetime as dt
import logging
import os
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np

from hybridtrade import backtest, report
from hybridtrade.config import ConfigError, RunConfig, load_config
from hybridtrade.emd import decompose
from hybridtrade.marketdata import DataError, InsufficientHistory, Universe, load_directory, load_ohlcv_csv
from hybridtrade.strategy import (
    ConfirmConfig,
    DegenerateWindow,
    SelectionError,
    select_stock,
    window_normalize,
)
from hybridtrade.topsis import DecisionMatrix, TopsisError, rank

log = logging.getLogger("hybridtrade")


class CommandError(RuntimeError):
    pass


def load_universe(cfg: RunConfig) -> Universe:
    if cfg.symbols is not None:
        return load_directory(cfg.data_dir, cfg.symbols)
    names = sorted(p.stem for p in Path(cfg.data_dir).glob("*.csv") if p.stem != cfg.benchmark)
    if not names:
        raise DataError(f"no CSV files in {cfg.data_dir}")
    return load_directory(cfg.data_dir, names)


@contextlib.contextmanager
def staged_outputs(out_dir: Path):
    """Yield a scratch directory whose files land in ``out_dir`` only on success."""
    out_dir.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=".staging-", dir=out_dir))
    try:
        yield stage
        for f in stage.iterdir():
            os.replace(f, out_dir / f.name)
    finally:
        shutil.rmtree(stage, ignore_errors=True)


def _day(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text!r}") from None


def read_matrix_csv(path, cfg: RunConfig) -> DecisionMatrix:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], [r for r in rows[1:] if r]
    names = header[1:]
    weights = cfg.criteria.weights if cfg.criteria.weights and len(cfg.criteria.weights) == len(names) else None
    return DecisionMatrix.build([r[0] for r in body], names,
                                [[float(v) for v in r[1:]] for r in body], "cost", weights)


def cmd_rank(cfg: RunConfig, date: dt.date, matrix: str | None = None, out=None) -> None:
    out = out or sys.stdout
    if matrix is not None:
        ranking = rank(read_matrix_csv(matrix, cfg), cfg.criteria.normalization)
    else:
        universe = load_universe(cfg)
        if np.datetime64(date, "D") not in universe.calendar:
            raise CommandError(f"{date} is not a trading day in the data")
        try:
            _, ranking = select_stock(universe.view(date), cfg.criteria)
        except SelectionError as exc:
            raise CommandError(f"insufficient history: {exc}") from None
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["alternative", "xi", "rank"])
    for alt, xi, r in ranking.rows():
        w.writerow([alt, repr(xi), r])


def run_report(cfg: RunConfig) -> tuple[backtest.BacktestReport, dict]:
    """Library-level backtest plus the extras summary.json carries."""
    seed = cfg.require_seed()
    start, end = cfg.require_period()
    universe = load_universe(cfg)
    rep = backtest.run_backtest(universe, start, end, cfg.criteria, cfg.confirm)
    summary = rep.summary()
    summary["config"]["seed"] = seed
    if cfg.benchmark:
        index = load_ohlcv_csv(Path(cfg.data_dir) / f"{cfg.benchmark}.csv", cfg.benchmark)
        summary["benchmark"] = {"symbol": cfg.benchmark,
                                "percentage_return": backtest.benchmark_return(index, start, end)}
    if cfg.baseline_runs:
        base = backtest.random_baseline(universe, start, end, cfg.baseline_runs, seed, cfg.criteria)
        summary["random_baseline"] = {
            "runs": cfg.baseline_runs,
            "accuracy_mean": base.accuracy_mean, "accuracy_std": base.accuracy_std,
            "return_mean": base.return_mean, "return_std": base.return_std,
        }
    return rep, summary


def cmd_backtest(cfg: RunConfig, out=None) -> None:
    out = out or sys.stdout
    rep, summary = run_report(cfg)
    with staged_outputs(cfg.output_dir) as stage:
        report.write_trades_csv(rep.trades, stage / "trades.csv")
        report.write_summary_json(summary, stage / "summary.json")
        report.write_audit_jsonl(rep, stage / "audit.jsonl")
    acc = "n/a" if rep.accuracy is None else f"{rep.accuracy:.2f}%"
    print(f"trades={len(rep.trades)} accuracy={acc} return={rep.percentage_return:.2f}%", file=out)


def cmd_grid(cfg: RunConfig, windows: list[int], out=None) -> None:
    out = out or sys.stdout
    seed = cfg.require_seed()
    start, end = cfg.require_period()
    confirm = cfg.confirm or ConfirmConfig()
    rows = backtest.grid_search(load_universe(cfg), start, end, cfg.criteria, windows,
                                confirm.delays, confirm.neurons, seed)
    with staged_outputs(cfg.output_dir) as stage:
        report.write_grid_csv(rows, stage / "grid.csv")
    total = sum(r.negotiations for r in rows)
    print(f"rows={len(rows)} trades={total} windows={windows[0]}..{windows[-1]}", file=out)


def cmd_decompose(cfg: RunConfig, symbol: str, date: dt.date, window: int, out=None) -> None:
    out = out or sys.stdout
    universe = load_universe(cfg)
    if symbol not in universe.histories:
        raise CommandError(f"unknown symbol {symbol!r}")
    try:
        series = window_normalize(universe.view(date).window(symbol, window))
    except (InsufficientHistory, DegenerateWindow) as exc:
        raise CommandError(str(exc)) from None
    parts = decompose(series, (cfg.confirm or ConfirmConfig()).sift)
    with staged_outputs(cfg.output_dir) as stage:
        parts.to_csv(stage / "decompose.csv", series)
    print(f"imfs={len(parts)} length={len(series)} last_residuum={parts.residuum[-1]:.4f}", file=out)


def parse_bins(spec: str) -> dict[str, tuple[float, ...]]:
    """``"RSI=0:100:10;CCI=-400:400:100"``; ``default`` gives the stock bins."""
    if spec.strip() == "default":
        return dict(backtest.DEFAULT_BINS)
    bins = {}
    for part in filter(None, (p.strip() for p in spec.split(";"))):
        try:
            name, rng = part.split("=")
            lo, hi, step = (float(x) for x in rng.split(":"))
        except ValueError:
            raise ValueError(f"bad bin spec {part!r}; expected NAME=LO:HI:STEP") from None
        if step <= 0 or hi <= lo:
            raise ValueError(f"bad bin range in {part!r}")
        k = int(round((hi - lo) / step))
        bins[name.strip()] = tuple(float(lo + i * step) for i in range(k + 1))
    if not bins:
        raise ValueError("empty bin spec")
    return bins


def cmd_hist(cfg: RunConfig, bins: dict, out=None) -> None:
    out = out or sys.stdout
    start, end = cfg.require_period()
    hists = backtest.indicator_histograms(load_universe(cfg), start, end, bins, cfg.criteria)
    with staged_outputs(cfg.output_dir) as stage:
        report.write_hist_csv(hists, stage / "hist.csv")
    n = sum(b.high + b.low for h in hists.values() for b in h)
    print(f"indicators={len(hists)} observations={n}", file=out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridtrade", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rank", help="print the TOPSIS ranking for one day")
    r.add_argument("--config", required=True)
    r.add_argument("--date", type=_day)
    r.add_argument("--matrix", help="rank a decision-matrix CSV (alternative,crit1,...) instead")

    b = sub.add_parser("backtest", help="walk-forward backtest; writes trades/summary/audit")
    b.add_argument("--config", required=True)

    g = sub.add_parser("grid", help="sweep the confirmation window size")
    g.add_argument("--config", required=True)
    g.add_argument("--windows", default="20:400:10", help="LO:HI:STEP, HI inclusive")

    d = sub.add_parser("decompose", help="EMD of one normalized price window")
    d.add_argument("--config", required=True)
    d.add_argument("--symbol", required=True)
    d.add_argument("--date", type=_day, required=True)
    d.add_argument("--window", type=int, required=True)

    h = sub.add_parser("hist", help="indicator histograms of next-day rises")
    h.add_argument("--config", required=True)
    h.add_argument("--bins", default="default")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "rank":
            if args.date is None and args.matrix is None:
                raise CommandError("rank needs --date (or --matrix)")
            cmd_rank(cfg, args.date, args.matrix)
        elif args.command == "backtest":
            cmd_backtest(cfg)
        elif args.command == "grid":
            cmd_grid(cfg, backtest.parse_range(args.windows))
        elif args.command == "decompose":
            cmd_decompose(cfg, args.symbol, args.date, args.window)
        elif args.command == "hist":
            cmd_hist(cfg, parse_bins(args.bins))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (CommandError, DataError, TopsisError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
