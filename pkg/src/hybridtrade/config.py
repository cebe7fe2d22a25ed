"""Run configuration: a YAML file with nested ``criteria``/``confirm`` blocks.

Example::

    data_dir: data/synthetic
    benchmark: INDEX
    seed: 42
    period: {start: 2016-07-01, end: 2017-12-29}
    output_dir: out
    criteria:
      indicators: [StochK, StochD, CCI]
      periods: {RSI: 14, StochK: 14, StochD: 3, CCI: 14}
      normalization: max_min
    confirm:
      enabled: true
      window: 50

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import yaml

from hybridtrade.strategy import ConfirmConfig, CriteriaConfig

_TOP_KEYS = {"data_dir", "symbols", "benchmark", "seed", "period", "output_dir",
             "criteria", "confirm", "baseline_runs"}


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.field = path


@dataclass(frozen=True)
class RunConfig:
    data_dir: Path
    output_dir: Path
    criteria: CriteriaConfig
    confirm: ConfirmConfig | None
    seed: int | None = None
    start: dt.date | None = None
    end: dt.date | None = None
    symbols: tuple[str, ...] | None = None
    benchmark: str | None = None
    baseline_runs: int = 0

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("seed", "required for backtest and grid runs")
        return self.seed

    def require_period(self) -> tuple[dt.date, dt.date]:
        if self.start is None or self.end is None:
            raise ConfigError("period", "start and end are required")
        return self.start, self.end


def _date(value, where: str) -> dt.date:
    if isinstance(value, dt.datetime):
        return value.date()
    if isinstance(value, dt.date):
        return value
    try:
        return dt.date.fromisoformat(str(value))
    except ValueError:
        raise ConfigError(where, f"not an ISO date: {value!r}") from None


def _int(value, where: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(where, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(where, f"must be >= {minimum}")
    return value


def _criteria(block, where="criteria") -> CriteriaConfig:
    block = block or {}
    if not isinstance(block, dict):
        raise ConfigError(where, "expected a mapping")
    unknown = set(block) - {"indicators", "periods", "weights", "normalization"}
    if unknown:
        raise ConfigError(f"{where}.{sorted(unknown)[0]}", "unknown key")
    kw = {}
    if "indicators" in block:
        kw["indicators"] = tuple(block["indicators"] or ())
    periods = block.get("periods") or {}
    names = {"RSI": "rsi_period", "StochK": "k_period", "StochD": "d_period", "CCI": "cci_period"}
    for name, value in periods.items():
        if name not in names:
            raise ConfigError(f"{where}.periods.{name}", "unknown indicator")
        kw[names[name]] = _int(value, f"{where}.periods.{name}", 1)
    if block.get("weights") is not None:
        kw["weights"] = tuple(block["weights"])
    if "normalization" in block:
        kw["normalization"] = block["normalization"]
    try:
        return CriteriaConfig(**kw)
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None


def _confirm(block, seed, where="confirm") -> ConfirmConfig | None:
    if not block:
        return None
    if not isinstance(block, dict):
        raise ConfigError(where, "expected a mapping")
    unknown = set(block) - {"enabled", "window", "delays", "neurons"}
    if unknown:
        raise ConfigError(f"{where}.{sorted(unknown)[0]}", "unknown key")
    if not block.get("enabled", True):
        return None
    kw = {"seed": seed or 0}
    for key, attr in (("window", "window_size"), ("delays", "delays"), ("neurons", "neurons")):
        if key in block:
            kw[attr] = _int(block[key], f"{where}.{key}", 1)
    try:
        return ConfirmConfig(**kw)
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None


def parse_config(doc: dict, base_dir: Path) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a mapping")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    if "data_dir" not in doc:
        raise ConfigError("data_dir", "required")

    def resolve(p) -> Path:
        p = Path(str(p))
        return p if p.is_absolute() else (base_dir / p)

    seed = None if doc.get("seed") is None else _int(doc["seed"], "seed")
    start = end = None
    period = doc.get("period")
    if period is not None:
        if not isinstance(period, dict):
            raise ConfigError("period", "expected a mapping with start/end")
        start = _date(period.get("start"), "period.start")
        end = _date(period.get("end"), "period.end")
        if start > end:
            raise ConfigError("period", f"start {start} is after end {end}")
    symbols = doc.get("symbols")
    if symbols is not None:
        if not isinstance(symbols, list) or not all(isinstance(s, str) for s in symbols):
            raise ConfigError("symbols", "expected a list of tickers")
        symbols = tuple(symbols)
    return RunConfig(
        data_dir=resolve(doc["data_dir"]),
        output_dir=resolve(doc.get("output_dir", "out")),
        criteria=_criteria(doc.get("criteria")),
        confirm=_confirm(doc.get("confirm"), seed),
        seed=seed,
        start=start,
        end=end,
        symbols=symbols,
        benchmark=doc.get("benchmark"),
        baseline_runs=_int(doc.get("baseline_runs", 0), "baseline_runs", 0),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(str(path), f"invalid YAML: {exc}") from None
    return parse_config(doc, path.resolve().parent)
