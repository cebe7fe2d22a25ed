"""Writers for trades.csv, summary.json, grid.csv, hist.csv and audit.jsonl."""

from __future__ import annotations

import csv
import datetime as dt
import json
from pathlib import Path
from typing import Mapping, Sequence

from hybridtrade.backtest import BacktestReport, GridRow, HistBin, TradeRecord
from hybridtrade.strategy import audit_record

TRADE_COLUMNS = ("buy_date", "sell_date", "symbol", "buy_close", "sell_close", "return_pct", "confirmed")
GRID_COLUMNS = ("window", "delays", "neurons", "negotiations", "profitable", "accuracy", "percentage_return")
HIST_COLUMNS = ("indicator", "bin_low", "bin_high", "high_count", "low_count")


def _confirmed_field(value: bool | None) -> str:
    return "selection-only" if value is None else str(value).lower()


def write_trades_csv(trades: Sequence[TradeRecord], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRADE_COLUMNS)
        for t in trades:
            w.writerow([t.buy_date.isoformat(), t.sell_date.isoformat(), t.symbol,
                        repr(t.buy_close), repr(t.sell_close), repr(100.0 * t.return_fraction),
                        _confirmed_field(t.confirmed)])


def read_trades_csv(path) -> list[TradeRecord]:
    out = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            conf = row["confirmed"]
            out.append(TradeRecord(
                dt.date.fromisoformat(row["buy_date"]), dt.date.fromisoformat(row["sell_date"]),
                row["symbol"], float(row["buy_close"]), float(row["sell_close"]),
                None if conf == "selection-only" else conf == "true",
            ))
    return out


def write_summary_json(summary: Mapping, path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2, default=str) + "\n", encoding="utf-8")


def write_audit_jsonl(report: BacktestReport, path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for o in report.outcomes:
            if o.status == "held":
                continue
            rec = audit_record(o.date, o.ranking, o.selected, o.confirmation)
            rec["status"] = o.status
            fh.write(json.dumps(rec) + "\n")


def _fmt(v) -> str:
    return "" if v is None else repr(v) if isinstance(v, float) else str(v)


def write_grid_csv(rows: Sequence[GridRow], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GRID_COLUMNS)
        for r in rows:
            w.writerow([_fmt(getattr(r, c)) for c in GRID_COLUMNS])


def write_hist_csv(hists: Mapping[str, Sequence[HistBin]], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HIST_COLUMNS)
        for name, bins in hists.items():
            for b in bins:
                w.writerow([name, _fmt(b.low_edge), _fmt(b.high_edge), b.high, b.low])
