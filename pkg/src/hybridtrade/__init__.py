"""Daily stock selection with TOPSIS over technical indicators, confirmed by
an EMD residuum trend forecast from an extreme learning machine."""

from hybridtrade.marketdata import (
    CutoffView,
    InsufficientHistory,
    OhlcvBar,
    PriceHistory,
    Universe,
    build_universe,
    load_directory,
    load_ohlcv_csv,
)
from hybridtrade.topsis import DecisionMatrix, Ranking, normalize, rank
from hybridtrade.emd import ImfSet, SiftConfig, decompose
from hybridtrade.elm import ElmModel, TrainingSet
from hybridtrade.strategy import ConfirmConfig, CriteriaConfig, Trend
from hybridtrade.backtest import BacktestReport, TradeRecord, run_backtest

__version__ = "0.1.0"

__all__ = [
    "BacktestReport",
    "ConfirmConfig",
    "CriteriaConfig",
    "CutoffView",
    "DecisionMatrix",
    "ElmModel",
    "ImfSet",
    "InsufficientHistory",
    "OhlcvBar",
    "PriceHistory",
    "Ranking",
    "SiftConfig",
    "TradeRecord",
    "TrainingSet",
    "Trend",
    "Universe",
    "build_universe",
    "decompose",
    "load_directory",
    "load_ohlcv_csv",
    "normalize",
    "rank",
    "run_backtest",
]
