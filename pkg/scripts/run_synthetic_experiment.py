"""End-to-end run on the bundled synthetic data.

Compares indicator subsets in selection-only mode, adds the random baseline
and the index benchmark, then sweeps the confirmation window. Every output
uses the same report schema as the CLI.
"""

import argparse
import itertools
import json
import logging
import time
from pathlib import Path

from hybridtrade import report
from hybridtrade.backtest import (
    benchmark_return,
    grid_search,
    parse_range,
    random_baseline,
    run_backtest,
    selection_schedule,
)
from hybridtrade.indicators import INDICATORS
from hybridtrade.marketdata import load_directory, load_ohlcv_csv
from hybridtrade.strategy import ConfirmConfig, CriteriaConfig

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", type=Path, default=ROOT / "data" / "synthetic")
    ap.add_argument("--out", type=Path, default=ROOT / "out" / "experiment")
    ap.add_argument("--start", default="2016-03-01")
    ap.add_argument("--end", default="2017-11-30")
    ap.add_argument("--seed", type=int, default=2016)
    ap.add_argument("--runs", type=int, default=1000, help="random-baseline runs")
    ap.add_argument("--windows", default="20:400:10")
    ap.add_argument("--criteria", default="StochK,StochD,CCI",
                    help="indicator subset used for the baseline and the window sweep")
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING)
    args.out.mkdir(parents=True, exist_ok=True)

    names = sorted(p.stem for p in args.data.glob("*.csv") if p.stem != "INDEX")
    universe = load_directory(args.data, names)
    index = load_ohlcv_csv(args.data / "INDEX.csv", "INDEX")
    results = {"benchmark": benchmark_return(index, args.start, args.end)}

    print("selection-only runs by indicator subset")
    subsets = []
    for k in range(1, len(INDICATORS) + 1):
        for combo in itertools.combinations(INDICATORS, k):
            rep = run_backtest(universe, args.start, args.end, CriteriaConfig(indicators=combo))
            acc = "n/a" if rep.accuracy is None else f"{rep.accuracy:6.2f}%"
            print(f"  {'+'.join(combo):<26} trades={len(rep.trades):4d} accuracy={acc} "
                  f"return={rep.percentage_return:9.2f}%")
            subsets.append({"indicators": combo, "trades": len(rep.trades),
                            "accuracy": rep.accuracy, "percentage_return": rep.percentage_return})
    results["subsets"] = subsets

    criteria = CriteriaConfig(indicators=tuple(args.criteria.split(",")))
    base = random_baseline(universe, args.start, args.end, args.runs, args.seed, criteria)
    results["random_baseline"] = {"runs": args.runs, "accuracy_mean": base.accuracy_mean,
                                  "accuracy_std": base.accuracy_std,
                                  "return_mean": base.return_mean, "return_std": base.return_std}
    print(f"random baseline ({args.runs} runs): accuracy {base.accuracy_mean:.2f} +- "
          f"{base.accuracy_std:.2f}%, return {base.return_mean:.2f} +- {base.return_std:.2f}%")
    print(f"index buy-and-hold: {results['benchmark']:.2f}%")

    days = universe.days_between(args.start, args.end)
    schedule = selection_schedule(universe, days, criteria)
    plain = run_backtest(universe, args.start, args.end, criteria, selections=schedule)
    confirmed = run_backtest(universe, args.start, args.end, criteria,
                             ConfirmConfig(seed=args.seed), selections=schedule)
    report.write_trades_csv(confirmed.trades, args.out / "trades.csv")
    report.write_audit_jsonl(confirmed, args.out / "audit.jsonl")
    results["selection_only"] = plain.summary()
    results["confirmed"] = confirmed.summary()

    t0 = time.perf_counter()
    rows = grid_search(universe, args.start, args.end, criteria, parse_range(args.windows),
                       seed=args.seed)
    report.write_grid_csv(rows, args.out / "grid.csv")
    print(f"grid: {len(rows)} windows in {time.perf_counter() - t0:.1f} s")
    for r in rows:
        acc = "   n/a" if r.accuracy is None else f"{r.accuracy:6.2f}"
        print(f"  window {r.window:3d}: trades={r.negotiations:4d} accuracy={acc}% "
              f"return={r.percentage_return:9.2f}%")

    report.write_summary_json(results, args.out / "summary.json")
    print(f"outputs in {args.out}")


if __name__ == "__main__":
    main()
