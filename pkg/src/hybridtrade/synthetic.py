"""Synthetic OHLCV universes for tests, experiments and the bundled data."""

from __future__ import annotations

import datetime as dt
from pathlib import Path

import numpy as np

from hybridtrade.marketdata import PriceHistory, Universe, _as_day, write_ohlcv_csv


def business_days(start: dt.date, n: int) -> np.ndarray:
    first = np.busday_offset(np.datetime64(start, "D"), 0, roll="forward")
    return np.busday_offset(first, np.arange(n))


def _bars_from_closes(rng: np.random.Generator, closes: np.ndarray, prev_close: float):
    prev = np.r_[prev_close, closes[:-1]]
    opens = prev * np.exp(rng.normal(0.0, 0.004, len(closes)))
    top = np.maximum(opens, closes)
    bottom = np.minimum(opens, closes)
    highs = top * (1.0 + np.abs(rng.normal(0.0, 0.008, len(closes))))
    lows = bottom * (1.0 - np.abs(rng.normal(0.0, 0.008, len(closes))))
    volume = np.round(rng.lognormal(13.0, 0.5, len(closes)))
    return opens, highs, lows, volume


def random_history(rng: np.random.Generator, symbol: str, dates: np.ndarray,
                   start_price: float = 20.0, drift: float = 0.0, vol: float = 0.02) -> PriceHistory:
    """Geometric random walk with a slow sinusoidal regime on top."""
    n = len(dates)
    phase = rng.uniform(0, 2 * np.pi)
    period = rng.uniform(40, 160)
    regime = 0.004 * np.sin(2 * np.pi * np.arange(n) / period + phase)
    log_ret = rng.normal(drift, vol, n) + regime
    closes = np.round(start_price * np.exp(np.cumsum(log_ret)), 2)
    closes = np.maximum(closes, 0.01)
    o, h, l, v = _bars_from_closes(rng, closes, start_price)
    # Rounding to cents must not break low <= open, close <= high.
    o = np.round(o, 2)
    h = np.maximum(np.ceil(h * 100) / 100, np.maximum(o, closes))
    l = np.maximum(np.minimum(np.floor(l * 100) / 100, np.minimum(o, closes)), 0.01)
    o = np.clip(o, l, h)
    return PriceHistory(symbol, dates, o, h, l, closes, v)


def make_universe(n_symbols: int = 50, n_days: int = 500, seed: int = 7,
                  start: dt.date = dt.date(2016, 1, 4), gap_prob: float = 0.0,
                  with_index: bool = False):
    """A universe of ``n_symbols`` random stocks over ``n_days`` business days.

    With ``gap_prob > 0`` each stock independently misses that fraction of days.
    Returns ``(universe, index_history)`` when ``with_index`` is set; the index
    is the equal-weight average of the stocks' closes.
    """
    rng = np.random.default_rng(seed)
    dates = business_days(start, n_days)
    histories = {}
    for k in range(n_symbols):
        sym = f"S{k:02d}"
        h = random_history(rng, sym, dates, start_price=float(rng.uniform(5, 60)),
                           drift=float(rng.normal(0.0003, 0.0005)),
                           vol=float(rng.uniform(0.01, 0.03)))
        if gap_prob > 0:
            keep = rng.random(n_days) >= gap_prob
            keep[0] = True
            h = PriceHistory(sym, *(c[keep] for c in h._columns()))
        histories[sym] = h
    universe = Universe(histories)
    if not with_index:
        return universe
    closes = np.mean([h.close / h.close[0] for h in histories.values() if len(h) == n_days], axis=0)
    level = np.round(50000 * closes, 2)
    index = PriceHistory("INDEX", dates, level, level, level, level, np.zeros(n_days))
    return universe, index


def perturb_after(universe: Universe, cutoff, seed: int = 0) -> Universe:
    """Copy of ``universe`` with every bar dated after ``cutoff`` redrawn."""
    rng = np.random.default_rng(seed)
    day = _as_day(cutoff)
    out = {}
    for sym, h in universe.histories.items():
        keep = h.count_through(day)
        if keep == len(h):
            out[sym] = h
            continue
        tail = random_history(rng, sym, h.dates[keep:], start_price=float(rng.uniform(5, 60)),
                              vol=0.05)
        cols = [np.r_[a[:keep], b] for a, b in zip(h._columns()[1:], tail._columns()[1:])]
        out[sym] = PriceHistory(sym, h.dates, *cols)
    return Universe(out)


def write_universe(universe: Universe, directory, index: PriceHistory | None = None) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for h in universe.histories.values():
        write_ohlcv_csv(h, directory / f"{h.symbol}.csv")
    if index is not None:
        write_ohlcv_csv(index, directory / f"{index.symbol}.csv")
