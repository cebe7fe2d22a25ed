"""RSI, stochastic %K/%D and CCI, plus the crossing rules built on them.

Every series function returns a float array aligned with its input, NaN where
the indicator is still warming up. Each value is computed from its own
trailing window only, so a value never changes when bars are appended.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from hybridtrade.marketdata import PriceHistory

INDICATORS = ("RSI", "StochK", "StochD", "CCI")
CCI_SCALE = 0.015


def _nan(n: int) -> np.ndarray:
    return np.full(n, np.nan)


def rsi(closes, n: int = 14) -> np.ndarray:
    """Relative strength index with simple means over the last ``n`` changes."""
    if n < 1:
        raise ValueError("period must be >= 1")
    closes = np.asarray(closes, dtype=float)
    out = _nan(len(closes))
    if len(closes) <= n:
        return out
    changes = sliding_window_view(np.diff(closes), n)
    gain = np.where(changes > 0, changes, 0.0).sum(axis=1) / n
    loss = np.where(changes < 0, -changes, 0.0).sum(axis=1) / n
    with np.errstate(divide="ignore", invalid="ignore"):
        value = 100.0 - 100.0 / (1.0 + gain / loss)
    value = np.where(loss == 0, np.where(gain > 0, 100.0, 50.0), value)
    out[n:] = value
    return out


def stochastic_k(high, low, close, n: int = 14) -> np.ndarray:
    """%K over the n+1 bars t-n..t; a flat window gives 50."""
    if n < 1:
        raise ValueError("period must be >= 1")
    high, low, close = (np.asarray(a, dtype=float) for a in (high, low, close))
    out = _nan(len(close))
    if len(close) <= n:
        return out
    hi = sliding_window_view(high, n + 1).max(axis=1)
    lo = sliding_window_view(low, n + 1).min(axis=1)
    span = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        k = 100.0 * (close[n:] - lo) / span
    out[n:] = np.where(span > 0, k, 50.0)
    return out


def stochastic_d(k, n: int = 3) -> np.ndarray:
    """Simple moving average of the last ``n`` %K values."""
    if n < 1:
        raise ValueError("period must be >= 1")
    k = np.asarray(k, dtype=float)
    out = _nan(len(k))
    if len(k) < n:
        return out
    # NaN anywhere in the window propagates, which is the warm-up rule.
    out[n - 1 :] = sliding_window_view(k, n).sum(axis=1) / n
    return out


def typical_price(high, low, close) -> np.ndarray:
    return (np.asarray(close, float) + np.asarray(low, float) + np.asarray(high, float)) / 3.0


def cci(high, low, close, n: int = 14) -> np.ndarray:
    """Commodity channel index; zero mean deviation gives 0."""
    if n < 1:
        raise ValueError("period must be >= 1")
    p = typical_price(high, low, close)
    out = _nan(len(p))
    if len(p) < n:
        return out
    win = sliding_window_view(p, n)
    mean = win.sum(axis=1) / n
    mad = np.abs(win - mean[:, None]).sum(axis=1) / n
    # Rounding can leave a constant window with a residual deviation.
    flat = mad <= 1e-12 * np.maximum(np.abs(mean), 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = (p[n - 1 :] - mean) / (CCI_SCALE * mad)
    out[n - 1 :] = np.where(flat, 0.0, value)
    return out


def warmup(name: str, period: int, k_period: int = 14) -> int:
    """Bars needed before the first defined value of an indicator."""
    if name == "RSI":
        return period + 1
    if name == "StochK":
        return period + 1
    if name == "StochD":
        return k_period + period
    if name == "CCI":
        return period
    raise ValueError(f"unknown indicator {name!r}")


def compute(name: str, high, low, close, period: int, k_period: int = 14) -> np.ndarray:
    if name == "RSI":
        return rsi(close, period)
    if name == "StochK":
        return stochastic_k(high, low, close, period)
    if name == "StochD":
        return stochastic_d(stochastic_k(high, low, close, k_period), period)
    if name == "CCI":
        return cci(high, low, close, period)
    raise ValueError(f"unknown indicator {name!r}")


@dataclass(frozen=True)
class IndicatorSeries:
    symbol: str
    name: str
    period: int
    dates: np.ndarray
    values: np.ndarray

    @classmethod
    def from_history(cls, history: PriceHistory, name: str, period: int,
                     k_period: int = 14) -> "IndicatorSeries":
        values = compute(name, history.high, history.low, history.close, period, k_period)
        return cls(history.symbol, name, period, history.dates, values)

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["date", "value"])
            for d, v in zip(self.dates, self.values):
                w.writerow([str(d), "" if np.isnan(v) else repr(float(v))])


class Signal(enum.Enum):
    BUY = "buy"
    SELL = "sell"
    NEUTRAL = "neutral"


_LEVELS = {"RSI": (30.0, 70.0), "K": (20.0, 80.0), "D": (20.0, 80.0)}


def _crossed_up(prev, curr, level) -> bool:
    return prev < level and curr > level


def _crossed_down(prev, curr, level) -> bool:
    return prev > level and curr < level


def classify_signal(rule: str, prev, curr) -> Signal:
    """Classify one day under the RSI, K, D, KD or CCI crossing rule.

    For ``KD`` the arguments are ``(k, d)`` pairs; otherwise scalars.
    """
    vals = np.asarray([prev, curr], dtype=float)
    if np.isnan(vals).any():
        raise ValueError(f"{rule} rule needs defined values at t-1 and t")
    if rule in _LEVELS:
        lower, upper = _LEVELS[rule]
        if _crossed_up(prev, curr, lower):
            return Signal.BUY
        if _crossed_down(prev, curr, upper):
            return Signal.SELL
        return Signal.NEUTRAL
    if rule == "KD":
        (k0, d0), (k1, d1) = prev, curr
        if k0 < d0 and k1 > d1:
            return Signal.BUY
        if k0 > d0 and k1 < d1:
            return Signal.SELL
        return Signal.NEUTRAL
    if rule == "CCI":
        if _crossed_up(prev, curr, -100.0) or _crossed_up(prev, curr, 100.0):
            return Signal.BUY
        if _crossed_down(prev, curr, -100.0) or _crossed_down(prev, curr, 100.0):
            return Signal.SELL
        return Signal.NEUTRAL
    raise ValueError(f"unknown rule {rule!r}")
