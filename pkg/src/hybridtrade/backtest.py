"""Walk-forward simulation of buy-at-close, sell-at-next-close trading.

Each trading day the strategy ranks the eligible stocks, optionally asks the
EMD-ELM stage to confirm the winner, and if a trade is opened it is closed at
the stock's own next close. While a position is open no new one is opened.
"""

from __future__ import annotations

import datetime as dt
import logging
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from hybridtrade import indicators
from hybridtrade.marketdata import PriceHistory, Universe
from hybridtrade.strategy import (
    Confirmation,
    ConfirmConfig,
    CriteriaConfig,
    SelectionError,
    confirm_purchase,
    eligible_rows,
    select_stock,
)
from hybridtrade.topsis import Ranking, TopsisError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TradeRecord:
    buy_date: dt.date
    sell_date: dt.date
    symbol: str
    buy_close: float
    sell_close: float
    confirmed: bool | None = None  # None: selection-only run

    @property
    def return_fraction(self) -> float:
        return (self.sell_close - self.buy_close) / self.buy_close

    @property
    def profitable(self) -> bool:
        return self.sell_close > self.buy_close


@dataclass
class DayOutcome:
    date: dt.date
    status: str  # traded | declined | unconfirmable | no_matrix | voided | held
    selected: str | None = None
    ranking: Ranking | None = None
    confirmation: Confirmation | None = None
    trade: TradeRecord | None = None
    note: str | None = None


def accuracy(trades: Sequence[TradeRecord]) -> float:
    """Percent of trades whose close rose; a flat close is not a win."""
    if not trades:
        raise ValueError("accuracy is undefined without trades")
    wins = sum(1 for t in trades if t.profitable)
    return 100.0 * wins / len(trades)


def cumulative_return(trades: Iterable[TradeRecord]) -> tuple[float, float]:
    """``(Rc, percentage return)`` compounded in the given (date) order."""
    rc = 1.0
    for t in trades:
        rc *= 1.0 + t.return_fraction
    return rc, (rc - 1.0) * 100.0


@dataclass
class BacktestReport:
    trades: list[TradeRecord]
    outcomes: list[DayOutcome] = field(repr=False)
    config: dict = field(default_factory=dict)

    def count(self, status: str) -> int:
        return sum(1 for o in self.outcomes if o.status == status)

    @property
    def declined(self) -> int:
        """Days where a selected stock was not bought (low trend or unconfirmable)."""
        return self.count("declined") + self.count("unconfirmable")

    @property
    def profitable(self) -> int:
        return sum(1 for t in self.trades if t.profitable)

    @property
    def accuracy(self) -> float | None:
        return accuracy(self.trades) if self.trades else None

    @property
    def cumulative_return(self) -> float:
        return cumulative_return(self.trades)[0]

    @property
    def percentage_return(self) -> float:
        return cumulative_return(self.trades)[1]

    def summary(self) -> dict:
        return {
            "trades": len(self.trades),
            "profitable": self.profitable,
            "accuracy": self.accuracy,
            "cumulative_return": self.cumulative_return,
            "percentage_return": self.percentage_return,
            "declined": self.declined,
            "declined_low": self.count("declined"),
            "unconfirmable": self.count("unconfirmable"),
            "no_matrix": self.count("no_matrix"),
            "voided": self.count("voided"),
            "held": self.count("held"),
            "days": len(self.outcomes),
            "config": self.config,
        }


def _period_days(universe: Universe, start, end) -> list[dt.date]:
    days = universe.days_between(start, end)
    if not days:
        raise ValueError(f"no trading days between {start} and {end}")
    return days


def _exit(history: PriceHistory, day: dt.date) -> tuple[dt.date, float] | None:
    i = history.count_through(day)
    if i >= len(history):
        return None
    return history.dates[i].astype(dt.date), float(history.close[i])


def select_day(universe: Universe, day: dt.date, criteria: CriteriaConfig):
    """``(symbol, ranking)`` for one day, or ``(None, reason)``."""
    try:
        return select_stock(universe.view(day), criteria)
    except (SelectionError, TopsisError) as exc:
        return None, str(exc)


def decide_day(universe: Universe, day: dt.date, criteria: CriteriaConfig,
               confirm: ConfirmConfig | None = None, selection=None) -> DayOutcome:
    """Everything the strategy does on ``day``, including the resulting trade."""
    symbol, ranking = selection if selection is not None else select_day(universe, day, criteria)
    if symbol is None:
        return DayOutcome(day, "no_matrix", note=ranking)
    conf = None
    if confirm is not None:
        conf = confirm_purchase(universe.view(day), symbol, confirm)
        if conf.trend is None:
            return DayOutcome(day, "unconfirmable", symbol, ranking, conf, note=conf.reason)
        if not conf.confirmed:
            return DayOutcome(day, "declined", symbol, ranking, conf)
    history = universe[symbol]
    exit_ = _exit(history, day)
    if exit_ is None:
        log.warning("%s: %s has no next bar; trade voided", day, symbol)
        return DayOutcome(day, "voided", symbol, ranking, conf, note="no next bar")
    buy_close = float(history.close[history.position(day)])
    trade = TradeRecord(day, exit_[0], symbol, buy_close, exit_[1],
                        None if confirm is None else True)
    return DayOutcome(day, "traded", symbol, ranking, conf, trade)


def selection_schedule(universe: Universe, days: Sequence[dt.date], criteria: CriteriaConfig) -> dict:
    return {d: select_day(universe, d, criteria) for d in days}


def _config_snapshot(start, end, criteria, confirm) -> dict:
    snap = {
        "start": str(start),
        "end": str(end),
        "criteria": asdict(criteria),
        "confirm": None if confirm is None else asdict(confirm),
    }
    return snap


def run_backtest(universe: Universe, start, end, criteria: CriteriaConfig | None = None,
                 confirm: ConfirmConfig | None = None,
                 selections: Mapping[dt.date, tuple] | None = None) -> BacktestReport:
    """Walk forward over the trading days in ``[start, end]``.

    ``selections`` may carry precomputed :func:`select_day` results; they do
    not depend on the confirmation settings, so grid runs share them.
    """
    criteria = criteria or CriteriaConfig()
    days = _period_days(universe, start, end)
    outcomes, trades = [], []
    busy_until: dt.date | None = None
    for day in days:
        if busy_until is not None and day < busy_until:
            outcomes.append(DayOutcome(day, "held"))
            continue
        sel = selections.get(day) if selections is not None else None
        out = decide_day(universe, day, criteria, confirm, sel)
        outcomes.append(out)
        if out.trade is not None:
            trades.append(out.trade)
            busy_until = out.trade.sell_date
    return BacktestReport(trades, outcomes, _config_snapshot(start, end, criteria, confirm))


@dataclass(frozen=True)
class BaselineResult:
    accuracy_mean: float
    accuracy_std: float
    return_mean: float
    return_std: float
    accuracies: np.ndarray = field(repr=False)
    returns: np.ndarray = field(repr=False)


def random_baseline(universe: Universe, start, end, runs: int = 1000, seed: int = 0,
                    criteria: CriteriaConfig | None = None) -> BaselineResult:
    """Pick a uniformly random eligible stock each day, ``runs`` times.

    Eligibility matches the decision matrix: the stock trades that day and has
    every configured indicator defined. Spreads are population std (ddof=0).
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    criteria = criteria or CriteriaConfig()
    days = _period_days(universe, start, end)
    eligible = []
    exits: dict[tuple[dt.date, str], tuple[dt.date, float] | None] = {}
    for d in days:
        syms = sorted(eligible_rows(universe.view(d), criteria))
        eligible.append(syms if len(syms) >= 2 else [])
        for s in syms:
            h = universe[s]
            ex = _exit(h, d)
            exits[(d, s)] = None if ex is None else (ex[0], (ex[1] - h.close[h.position(d)]) / h.close[h.position(d)])
    accs, rets = np.empty(runs), np.empty(runs)
    for k, ss in enumerate(np.random.SeedSequence(seed).spawn(runs)):
        rng = np.random.default_rng(ss)
        busy_until = None
        wins = n = 0
        rc = 1.0
        for d, syms in zip(days, eligible):
            if not syms or (busy_until is not None and d < busy_until):
                continue
            pick = syms[int(rng.integers(len(syms)))]
            ex = exits[(d, pick)]
            if ex is None:
                continue
            busy_until, r = ex
            n += 1
            wins += r > 0
            rc *= 1.0 + r
        accs[k] = 100.0 * wins / n if n else np.nan
        rets[k] = (rc - 1.0) * 100.0
    return BaselineResult(float(np.nanmean(accs)), float(np.nanstd(accs)),
                          float(rets.mean()), float(rets.std()), accs, rets)


def benchmark_return(index: PriceHistory, start, end) -> float:
    """Buy-and-hold percentage return of ``index`` over ``[start, end]``."""
    start, end = np.datetime64(start, "D"), np.datetime64(end, "D")
    if len(index) == 0 or index.dates[0] > start or index.dates[-1] < end:
        raise ValueError(f"{index.symbol} does not cover {start}..{end}")
    sel = (index.dates >= start) & (index.dates <= end)
    closes = index.close[sel]
    if len(closes) == 0:
        raise ValueError(f"{index.symbol} has no bars in {start}..{end}")
    return (closes[-1] / closes[0] - 1.0) * 100.0


@dataclass(frozen=True)
class GridRow:
    window: int
    delays: int
    neurons: int
    negotiations: int
    profitable: int
    accuracy: float | None
    percentage_return: float


def parse_range(spec: str) -> list[int]:
    """``"LO:HI:STEP"`` with HI inclusive."""
    try:
        lo, hi, step = (int(x) for x in spec.split(":"))
    except ValueError:
        raise ValueError(f"range spec must be LO:HI:STEP, got {spec!r}") from None
    if step < 1 or lo > hi or lo < 1:
        raise ValueError(f"invalid range spec {spec!r}")
    return list(range(lo, hi + 1, step))


DEFAULT_WINDOWS = tuple(range(20, 401, 10))


def grid_search(universe: Universe, start, end, criteria: CriteriaConfig | None = None,
                windows: Sequence[int] = DEFAULT_WINDOWS, delays: int = 6, neurons: int = 20,
                seed: int = 0) -> list[GridRow]:
    criteria = criteria or CriteriaConfig()
    schedule = selection_schedule(universe, _period_days(universe, start, end), criteria)
    rows = []
    for w in windows:
        confirm = ConfirmConfig(window_size=w, delays=delays, neurons=neurons, seed=seed)
        rep = run_backtest(universe, start, end, criteria, confirm, selections=schedule)
        rows.append(GridRow(w, delays, neurons, len(rep.trades), rep.profitable,
                            rep.accuracy, rep.percentage_return))
        log.info("window %d: %d trades", w, len(rep.trades))
    return rows


@dataclass
class HistBin:
    low_edge: float
    high_edge: float
    high: int = 0
    low: int = 0


DEFAULT_BINS = {
    "RSI": tuple(range(0, 101, 10)),
    "StochK": tuple(range(0, 101, 10)),
    "StochD": tuple(range(0, 101, 10)),
    "CCI": tuple(range(-400, 401, 100)),
}


def _bin_index(edges: np.ndarray, value: float) -> int | None:
    if value < edges[0] or value > edges[-1]:
        return None
    j = int(np.searchsorted(edges, value, side="right")) - 1
    return min(j, len(edges) - 2)


def indicator_histograms(universe: Universe, start, end,
                         bins: Mapping[str, Sequence[float]] | None = None,
                         criteria: CriteriaConfig | None = None) -> dict[str, list[HistBin]]:
    """Count next-day rises ("high") and non-rises ("low") per indicator range.

    Bins are half-open ``[lo, hi)`` except the last, which includes its upper
    edge. Values outside all bins and days without a next bar are skipped.
    """
    bins = dict(bins or DEFAULT_BINS)
    criteria = criteria or CriteriaConfig()
    lo_day, hi_day = np.datetime64(start, "D"), np.datetime64(end, "D")
    out = {}
    for name, edges in bins.items():
        edges = np.asarray(edges, dtype=float)
        if len(edges) < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError(f"bin edges for {name} must be increasing, at least two")
        hist = [HistBin(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:])]
        for h in universe.histories.values():
            values = indicators.compute(name, h.high, h.low, h.close,
                                        criteria.period(name), criteria.k_period)
            for i in range(len(h) - 1):
                if not (lo_day <= h.dates[i] <= hi_day) or np.isnan(values[i]):
                    continue
                j = _bin_index(edges, values[i])
                if j is None:
                    continue
                if h.close[i + 1] > h.close[i]:
                    hist[j].high += 1
                else:
                    hist[j].low += 1
        out[name] = hist
    return out
