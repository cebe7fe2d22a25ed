"""OHLCV ingestion, the shared trading calendar and date-fenced views.

Histories are held as read-only numpy columns. A :class:`CutoffView` only
ever hands out slices ending at its cutoff day, so code written against a
view cannot see later bars.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

CSV_HEADER = ("date", "open", "high", "low", "close", "volume")


class DataError(ValueError):
    """Malformed or inconsistent market data."""


class InsufficientHistory(LookupError):
    """Not enough bars at or before the cutoff for the requested operation."""


def _as_day(value) -> np.datetime64:
    if isinstance(value, np.datetime64):
        return value.astype("datetime64[D]")
    if isinstance(value, str):
        value = dt.date.fromisoformat(value)
    return np.datetime64(value, "D")


def _to_date(day: np.datetime64) -> dt.date:
    return day.astype("datetime64[D]").astype(dt.date)


@dataclass(frozen=True)
class OhlcvBar:
    date: dt.date
    open: float
    high: float
    low: float
    close: float
    volume: float

    def validate(self) -> None:
        prices = (self.open, self.high, self.low, self.close)
        if not all(np.isfinite(p) for p in prices) or not np.isfinite(self.volume):
            raise DataError(f"{self.date}: non-finite value")
        if min(prices) <= 0:
            raise DataError(f"{self.date}: prices must be strictly positive")
        if self.volume < 0:
            raise DataError(f"{self.date}: negative volume")
        if self.low > self.high:
            raise DataError(f"{self.date}: low {self.low} > high {self.high}")
        if not (self.low <= self.open <= self.high):
            raise DataError(f"{self.date}: open outside [low, high]")
        if not (self.low <= self.close <= self.high):
            raise DataError(f"{self.date}: close outside [low, high]")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


class PriceHistory:
    """Date-ascending daily bars for one symbol, stored column-wise."""

    def __init__(self, symbol: str, dates, open_, high, low, close, volume):
        if isinstance(dates, np.ndarray) and np.issubdtype(dates.dtype, np.datetime64):
            dates = dates.astype("datetime64[D]")
        else:
            dates = np.asarray([_as_day(d) for d in dates], dtype="datetime64[D]")
        cols = [np.asarray(c, dtype=np.float64) for c in (open_, high, low, close, volume)]
        n = len(dates)
        if any(len(c) != n for c in cols):
            raise DataError(f"{symbol}: column lengths differ")
        if n and np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            dup = dates[1:][np.diff(dates) == np.timedelta64(0, "D")]
            if len(dup):
                raise DataError(f"{symbol}: duplicate date {_to_date(dup[0])}")
            raise DataError(f"{symbol}: dates not strictly increasing")
        self.symbol = symbol
        self.dates = _readonly(dates)
        self.open, self.high, self.low, self.close, self.volume = (_readonly(c) for c in cols)
        o, h, l, c, v = cols
        ok = (
            np.isfinite(np.stack(cols)).all(axis=0)
            & (np.minimum.reduce([o, h, l, c]) > 0)
            & (v >= 0) & (l <= h) & (l <= o) & (o <= h) & (l <= c) & (c <= h)
        )
        if not ok.all():
            bad = int(np.argmin(ok))
            bar = OhlcvBar(_to_date(dates[bad]), o[bad], h[bad], l[bad], c[bad], v[bad])
            bar.validate()
            raise DataError(f"{symbol}: invalid bar on {bar.date}")

    @classmethod
    def from_bars(cls, symbol: str, bars: Iterable[OhlcvBar]) -> "PriceHistory":
        bars = sorted(bars, key=lambda b: b.date)
        return cls(
            symbol,
            [b.date for b in bars],
            [b.open for b in bars],
            [b.high for b in bars],
            [b.low for b in bars],
            [b.close for b in bars],
            [b.volume for b in bars],
        )

    def __len__(self) -> int:
        return len(self.dates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PriceHistory):
            return NotImplemented
        return self.symbol == other.symbol and all(
            np.array_equal(a, b)
            for a, b in zip(self._columns(), other._columns())
        )

    def __repr__(self) -> str:
        return f"PriceHistory({self.symbol!r}, {len(self)} bars)"

    def _columns(self):
        return (self.dates, self.open, self.high, self.low, self.close, self.volume)

    @property
    def bars(self) -> list[OhlcvBar]:
        return [
            OhlcvBar(_to_date(d), float(o), float(h), float(l), float(c), float(v))
            for d, o, h, l, c, v in zip(*self._columns())
        ]

    def position(self, day) -> int | None:
        """Index of the bar dated ``day``, or None if the symbol did not trade."""
        day = _as_day(day)
        i = int(np.searchsorted(self.dates, day))
        if i < len(self.dates) and self.dates[i] == day:
            return i
        return None

    def count_through(self, day) -> int:
        """Number of bars dated on or before ``day``."""
        return int(np.searchsorted(self.dates, _as_day(day), side="right"))

    def next_trading_day(self, day) -> dt.date | None:
        i = self.count_through(day)
        return _to_date(self.dates[i]) if i < len(self.dates) else None

    def truncated(self, day) -> "PriceHistory":
        k = self.count_through(day)
        return PriceHistory(self.symbol, *(c[:k] for c in self._columns()))


def load_ohlcv_csv(path, symbol: str | None = None) -> PriceHistory:
    path = Path(path)
    symbol = symbol or path.stem
    bars = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip().lower() for h in header) != CSV_HEADER:
            raise DataError(f"{path}:1: expected header {','.join(CSV_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != len(CSV_HEADER):
                raise DataError(f"{path}:{lineno}: expected 6 fields, got {len(row)}")
            try:
                day = dt.date.fromisoformat(row[0].strip())
                o, h, l, c, v = (float(f) for f in row[1:])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            bar = OhlcvBar(day, o, h, l, c, v)
            bar.validate()
            bars.append(bar)
    return PriceHistory.from_bars(symbol, bars)


def write_ohlcv_csv(history: PriceHistory, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for b in history.bars:
            w.writerow([b.date.isoformat(), repr(b.open), repr(b.high), repr(b.low),
                        repr(b.close), repr(b.volume)])


class Universe:
    """A set of histories on the union calendar of their dates."""

    def __init__(self, histories: Mapping[str, PriceHistory]):
        if not histories:
            raise DataError("universe needs at least one history")
        self.histories = dict(sorted(histories.items()))
        days = np.unique(np.concatenate([h.dates for h in self.histories.values()]))
        self.calendar = _readonly(days)

    @property
    def symbols(self) -> list[str]:
        return list(self.histories)

    @property
    def days(self) -> list[dt.date]:
        return [_to_date(d) for d in self.calendar]

    def __getitem__(self, symbol: str) -> PriceHistory:
        return self.histories[symbol]

    def trades_on(self, symbol: str, day) -> bool:
        return self.histories[symbol].position(day) is not None

    def membership(self) -> np.ndarray:
        """Boolean (symbol x calendar day) matrix of who traded when."""
        return np.array([np.isin(self.calendar, h.dates) for h in self.histories.values()])

    def view(self, cutoff) -> "CutoffView":
        return CutoffView(self, cutoff)

    def days_between(self, start, end) -> list[dt.date]:
        start, end = _as_day(start), _as_day(end)
        sel = self.calendar[(self.calendar >= start) & (self.calendar <= end)]
        return [_to_date(d) for d in sel]

    def replace(self, history: PriceHistory) -> "Universe":
        return Universe({**self.histories, history.symbol: history})


def build_universe(histories: Sequence[PriceHistory]) -> Universe:
    seen: dict[str, PriceHistory] = {}
    for h in histories:
        if h.symbol in seen:
            raise DataError(f"duplicate symbol {h.symbol!r}")
        seen[h.symbol] = h
    return Universe(seen)


def load_directory(path, symbols: Sequence[str] | None = None) -> Universe:
    """Load one ``<SYMBOL>.csv`` per stock from a directory."""
    path = Path(path)
    if symbols is None:
        files = sorted(path.glob("*.csv"))
    else:
        files = [path / f"{s}.csv" for s in symbols]
    missing = [f for f in files if not f.is_file()]
    if missing:
        raise DataError(f"missing data file(s): {', '.join(str(f) for f in missing)}")
    return build_universe([load_ohlcv_csv(f) for f in files])


class CutoffView:
    """Read access to a universe that stops at ``cutoff`` inclusive."""

    def __init__(self, universe: Universe, cutoff):
        self.universe = universe
        self._day = _as_day(cutoff)
        self.cutoff = _to_date(self._day)

    def __repr__(self) -> str:
        return f"CutoffView({self.cutoff.isoformat()})"

    def trades_today(self, symbol: str) -> bool:
        return self.universe.trades_on(symbol, self._day)

    def trading_symbols(self) -> list[str]:
        return [s for s in self.universe.symbols if self.trades_today(s)]

    def _end(self, symbol: str) -> int:
        return self.universe[symbol].count_through(self._day)

    def n_bars(self, symbol: str) -> int:
        return self._end(symbol)

    def dates(self, symbol: str) -> np.ndarray:
        return self.universe[symbol].dates[: self._end(symbol)]

    def closes(self, symbol: str) -> np.ndarray:
        return self.universe[symbol].close[: self._end(symbol)]

    def highs(self, symbol: str) -> np.ndarray:
        return self.universe[symbol].high[: self._end(symbol)]

    def lows(self, symbol: str) -> np.ndarray:
        return self.universe[symbol].low[: self._end(symbol)]

    def history(self, symbol: str) -> PriceHistory:
        return self.universe[symbol].truncated(self._day)

    def window(self, symbol: str, length: int) -> np.ndarray:
        """The last ``length`` closes ending on the cutoff day, oldest first."""
        if length < 1:
            raise ValueError("window length must be >= 1")
        if not self.trades_today(symbol):
            raise InsufficientHistory(f"{symbol} has no bar on {self.cutoff}")
        end = self._end(symbol)
        if end < length:
            raise InsufficientHistory(
                f"{symbol}: {end} bars through {self.cutoff}, window needs {length}"
            )
        return self.universe[symbol].close[end - length : end]
