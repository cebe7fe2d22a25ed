"""Daily decision: pick a stock by TOPSIS, then confirm it with EMD-ELM.

Everything here reads market data through a :class:`CutoffView`, so a
decision made for day ``t`` cannot depend on bars dated after ``t``.
"""

from __future__ import annotations

import datetime as dt
import enum
import hashlib
from dataclasses import dataclass, field

import numpy as np

from hybridtrade import elm, indicators
from hybridtrade.emd import SiftConfig, decompose
from hybridtrade.marketdata import CutoffView, InsufficientHistory
from hybridtrade.topsis import METHODS, CriterionSpec, DecisionMatrix, Ranking, rank


class SelectionError(LookupError):
    """Fewer than two stocks are eligible on the cutoff day."""


class DegenerateWindow(ValueError):
    """The price window is constant, so it cannot be min-max scaled."""


@dataclass(frozen=True)
class CriteriaConfig:
    indicators: tuple[str, ...] = indicators.INDICATORS
    rsi_period: int = 14
    k_period: int = 14
    d_period: int = 3
    cci_period: int = 14
    weights: tuple[float, ...] | None = None
    normalization: str = "max_min"

    def __post_init__(self):
        names = tuple(self.indicators)
        object.__setattr__(self, "indicators", names)
        if not names:
            raise ValueError("at least one indicator is required")
        unknown = set(names) - set(indicators.INDICATORS)
        if unknown:
            raise ValueError(f"unknown indicator(s): {sorted(unknown)}")
        if len(set(names)) != len(names):
            raise ValueError("indicators must not repeat")
        for p in (self.rsi_period, self.k_period, self.d_period, self.cci_period):
            if int(p) != p or p < 1:
                raise ValueError("indicator periods must be positive integers")
        if self.normalization not in METHODS:
            raise ValueError(f"normalization must be one of {METHODS}")
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != len(names):
                raise ValueError(f"{len(w)} weights for {len(names)} indicators")
            if min(w) < 0 or not np.isclose(sum(w), 1.0, rtol=0, atol=1e-9):
                raise ValueError("weights must be nonnegative and sum to 1")
            object.__setattr__(self, "weights", w)

    def period(self, name: str) -> int:
        return {
            "RSI": self.rsi_period,
            "StochK": self.k_period,
            "StochD": self.d_period,
            "CCI": self.cci_period,
        }[name]

    def criteria(self) -> tuple[CriterionSpec, ...]:
        n = len(self.indicators)
        w = self.weights or (1.0 / n,) * n
        return tuple(CriterionSpec(name, "cost", wi) for name, wi in zip(self.indicators, w))


@dataclass(frozen=True)
class ConfirmConfig:
    window_size: int = 50
    delays: int = 6
    neurons: int = 20
    seed: int = 0
    sift: SiftConfig = field(default_factory=SiftConfig)

    def __post_init__(self):
        if self.delays < 1 or self.neurons < 1:
            raise ValueError("delays and neurons must be >= 1")
        if self.window_size - self.delays < 2:
            raise ValueError("window_size must exceed delays by at least 2")


class Trend(enum.Enum):
    HIGH = "high"
    LOW = "low"


def indicator_at(view: CutoffView, symbol: str, name: str, config: CriteriaConfig) -> float:
    """Value of one indicator on the cutoff day, NaN while warming up."""
    need = indicators.warmup(name, config.period(name), config.k_period)
    end = view.n_bars(symbol)
    if end < need:
        return float("nan")
    sl = slice(end - need, end)
    series = indicators.compute(
        name, view.highs(symbol)[sl], view.lows(symbol)[sl], view.closes(symbol)[sl],
        config.period(name), config.k_period,
    )
    return float(series[-1])


def eligible_rows(view: CutoffView, config: CriteriaConfig) -> dict[str, np.ndarray]:
    """Indicator rows of every stock that trades today with all values defined."""
    rows = {}
    for symbol in view.trading_symbols():
        row = np.array([indicator_at(view, symbol, n, config) for n in config.indicators])
        if np.isfinite(row).all():
            rows[symbol] = row
    return rows


def build_decision_matrix(view: CutoffView, config: CriteriaConfig) -> DecisionMatrix:
    rows = eligible_rows(view, config)
    if len(rows) < 2:
        raise SelectionError(f"{len(rows)} eligible stock(s) on {view.cutoff}; need 2")
    symbols = sorted(rows)
    return DecisionMatrix(tuple(symbols), config.criteria(), np.array([rows[s] for s in symbols]))


def select_stock(view: CutoffView, config: CriteriaConfig) -> tuple[str, Ranking]:
    ranking = rank(build_decision_matrix(view, config), config.normalization)
    return ranking.best, ranking


def window_normalize(prices) -> np.ndarray:
    s = np.asarray(prices, dtype=float)
    if len(s) < 2:
        raise DegenerateWindow("window needs at least two prices")
    lo, hi = s.min(), s.max()
    if not hi > lo:
        raise DegenerateWindow("constant price window")
    return (s - lo) / (hi - lo)


def embed_delays(series, delays: int) -> tuple[elm.TrainingSet, np.ndarray]:
    """Lagged rows ``r[k:k+delays] -> r[k+delays]`` and the final test vector."""
    r = np.asarray(series, dtype=float)
    n = len(r)
    if n <= delays:
        raise ValueError(f"series of length {n} cannot be embedded with {delays} delays")
    idx = np.arange(n - delays)[:, None] + np.arange(delays)
    return elm.TrainingSet(r[idx], r[delays:]), r[n - delays:].copy()


def classify_trend(y: float, last: float) -> Trend:
    if not (np.isfinite(y) and np.isfinite(last)):
        raise ValueError("trend inputs must be finite")
    return Trend.HIGH if y > last else Trend.LOW


def derive_seed(base: int, day: dt.date, symbol: str) -> int:
    key = f"{base}|{day.isoformat()}|{symbol}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class Confirmation:
    symbol: str
    date: dt.date
    trend: Trend | None
    reason: str | None = None
    prediction: float | None = None
    last_residuum: float | None = None
    residuum: np.ndarray | None = field(default=None, repr=False)
    n_imfs: int | None = None
    seed: int | None = None

    @property
    def confirmed(self) -> bool:
        return self.trend is Trend.HIGH

    @property
    def verdict(self) -> str:
        return self.trend.value if self.trend else "unconfirmable"


def forecast_trend(prices, config: ConfirmConfig, seed: int):
    """Normalize, decompose, fit the ELM on the residuum and classify.

    Returns ``(trend, prediction, residuum, n_imfs)``.
    """
    normalized = window_normalize(prices)
    parts = decompose(normalized, config.sift)
    train_set, test = embed_delays(parts.residuum, config.delays)
    model = elm.train(elm.init_model(config.delays, config.neurons, seed), train_set)
    y = elm.predict(model, test)
    return classify_trend(y, parts.residuum[-1]), y, parts.residuum, len(parts)


def confirm_purchase(view: CutoffView, symbol: str, config: ConfirmConfig) -> Confirmation:
    day = view.cutoff
    seed = derive_seed(config.seed, day, symbol)
    try:
        prices = view.window(symbol, config.window_size)
        trend, y, residuum, n_imfs = forecast_trend(prices, config, seed)
    except (InsufficientHistory, DegenerateWindow) as exc:
        return Confirmation(symbol, day, None, reason=str(exc), seed=seed)
    return Confirmation(symbol, day, trend, None, y, float(residuum[-1]), residuum, n_imfs, seed)


def audit_record(day: dt.date, ranking: Ranking | None, selected: str | None,
                 confirmation: Confirmation | None) -> dict:
    rec = {
        "date": day.isoformat(),
        "ranking": None if ranking is None else [
            {"alternative": a, "xi": x, "rank": r} for a, x, r in ranking.rows()
        ],
        "selected": selected,
        "verdict": None,
        "prediction": None,
        "r_n": None,
    }
    if confirmation is not None:
        rec.update(verdict=confirmation.verdict, prediction=confirmation.prediction,
                   r_n=confirmation.last_residuum)
    return rec
