import datetime as dt

import numpy as np
import pytest

from hybridtrade import backtest as bt
from hybridtrade.backtest import (
    DEFAULT_WINDOWS,
    TradeRecord,
    accuracy,
    benchmark_return,
    cumulative_return,
    grid_search,
    indicator_histograms,
    parse_range,
    random_baseline,
    run_backtest,
)
from hybridtrade.marketdata import PriceHistory, build_universe
from hybridtrade.strategy import Confirmation, ConfirmConfig, CriteriaConfig, Trend
from hybridtrade.synthetic import business_days, make_universe

from conftest import history_from_closes
from test_indicators import rsi_oracle

D = dt.date(2020, 1, 1)
K_ONLY = CriteriaConfig(indicators=("StochK",))


def trade(buy, sell, day=0):
    d = D + dt.timedelta(day)
    return TradeRecord(d, d + dt.timedelta(1), "X", buy, sell)


def test_metric_examples():
    rc, pct = cumulative_return([trade(100, 110), trade(100, 90, 1)])
    assert rc == pytest.approx(0.99, abs=1e-15) and pct == pytest.approx(-1.0, abs=1e-12)
    ts = [trade(100, 102), trade(100, 99, 1), trade(100, 103, 2)]
    # 1.02 * 0.99 * 1.03 = 1.040094 exactly.
    assert cumulative_return(ts)[0] == pytest.approx(1.040094, abs=1e-12)
    assert round(accuracy(ts), 2) == 66.67
    assert accuracy([trade(1, 2, i) for i in range(5)]) == 100.0


def test_empty_metrics():
    assert cumulative_return([]) == (1.0, 0.0)
    with pytest.raises(ValueError):
        accuracy([])


def test_flat_trade_not_profitable():
    assert not trade(10, 10).profitable
    assert accuracy([trade(10, 10), trade(10, 11, 1)]) == 50.0


def test_trending_universe(trending_universe):
    u = trending_universe
    start, end = u.days[20], u.days[-2]
    rep = run_backtest(u, start, end, K_ONLY)
    T = len(rep.trades)
    assert T == len(u.days_between(start, end))
    assert all(t.symbol == "A" for t in rep.trades)
    assert rep.accuracy == 100.0
    assert rep.cumulative_return == pytest.approx(1.01 ** T, rel=1e-12)


def test_always_low_confirmation(trending_universe, monkeypatch):
    def low(view, symbol, config):
        return Confirmation(symbol, view.cutoff, Trend.LOW)

    monkeypatch.setattr(bt, "confirm_purchase", low)
    u = trending_universe
    rep = run_backtest(u, u.days[20], u.days[-2], K_ONLY, ConfirmConfig(window_size=20))
    assert rep.trades == [] and rep.cumulative_return == 1.0 and rep.percentage_return == 0.0
    assert rep.accuracy is None and rep.declined == len(rep.outcomes)


def five_day_fixture():
    days = list(business_days(D, 5).astype(dt.date))
    a = PriceHistory("A", [days[i] for i in (0, 1, 3, 4)], [10, 11, 12, 13], [100, 110, 120, 130],
                     [10, 11, 12, 13], [10, 11, 12, 13], [1] * 4)
    closes = np.array([20, 19, 18, 17, 16.0])
    b = PriceHistory("B", days, closes, closes, closes * 0.5, closes, [1] * 5)
    return build_universe([a, b]), days


def test_five_day_hand_simulation():
    u, days = five_day_fixture()
    rep = run_backtest(u, days[0], days[4], CriteriaConfig(indicators=("StochK",), k_period=1))
    # Day 0: warm-up. Day 1: buy A, exit at A's next bar (day 3). Day 2: held.
    # Day 3: buy A, exit day 4. Day 4: A selected but has no next bar.
    assert [o.status for o in rep.outcomes] == ["no_matrix", "traded", "held", "traded", "voided"]
    assert rep.trades == [
        TradeRecord(days[1], days[3], "A", 11.0, 12.0),
        TradeRecord(days[3], days[4], "A", 12.0, 13.0),
    ]


def test_empty_period(small_universe):
    with pytest.raises(ValueError):
        run_backtest(small_universe, dt.date(1990, 1, 1), dt.date(1990, 2, 1))


def test_protocol_fidelity():
    u = make_universe(8, 200, seed=12, gap_prob=0.1)
    rep = run_backtest(u, u.days[20], u.days[-1])
    assert rep.trades
    prev_sell = None
    for t in rep.trades:
        h = u[t.symbol]
        assert h.next_trading_day(t.buy_date) == t.sell_date
        assert t.buy_close == h.close[h.position(t.buy_date)]
        assert t.sell_close == h.close[h.position(t.sell_date)]
        if prev_sell is not None:
            assert t.buy_date >= prev_sell
        prev_sell = t.sell_date
    assert len({t.buy_date for t in rep.trades}) == len(rep.trades)


def test_report_metrics_recompute(small_universe):
    u = small_universe
    rep = run_backtest(u, u.days[20], u.days[-1], confirm=ConfirmConfig(window_size=30, seed=2))
    s = rep.summary()
    assert s["trades"] == len(rep.trades)
    assert s["accuracy"] == accuracy(rep.trades)
    assert s["cumulative_return"] == cumulative_return(rep.trades)[0]
    assert s["days"] == len(u.days_between(u.days[20], u.days[-1]))


def test_confirmation_never_adds_trades(small_universe):
    u = small_universe
    plain = run_backtest(u, u.days[20], u.days[-1])
    for w in (20, 40, 60):
        confirmed = run_backtest(u, u.days[20], u.days[-1], confirm=ConfirmConfig(window_size=w))
        assert len(confirmed.trades) <= len(plain.trades)
        assert all(t.confirmed for t in confirmed.trades)


def test_report_is_deterministic(small_universe):
    u = small_universe
    cfg = ConfirmConfig(window_size=30, seed=9)
    a = run_backtest(u, u.days[20], u.days[-1], confirm=cfg)
    b = run_backtest(u, u.days[20], u.days[-1], confirm=cfg)
    assert a.trades == b.trades and a.summary() == b.summary()


# Random baseline.
def rising_universe(n_stocks=3, n_days=30):
    return build_universe([history_from_closes(f"R{i}", (10.0 + i) * 1.01 ** np.arange(n_days))
                           for i in range(n_stocks)])


def test_baseline_uniform_rise():
    u = rising_universe()
    res = random_baseline(u, u.days[20], u.days[-2], runs=50, seed=1)
    assert res.accuracy_mean == 100.0 and res.accuracy_std == 0.0
    assert res.return_std == pytest.approx(0.0, abs=1e-9)


def test_baseline_deterministic(small_universe):
    u = small_universe
    a = random_baseline(u, u.days[30], u.days[-1], runs=30, seed=4)
    b = random_baseline(u, u.days[30], u.days[-1], runs=30, seed=4)
    assert (a.accuracy_mean, a.accuracy_std, a.return_mean, a.return_std) == \
           (b.accuracy_mean, b.accuracy_std, b.return_mean, b.return_std)
    assert np.array_equal(a.returns, b.returns)


def test_baseline_analytic_expectation():
    rng = np.random.default_rng(6)
    n = 13
    hs = [history_from_closes(s, 10 * np.exp(np.cumsum(rng.normal(0, 0.02, n)))) for s in "PQ"]
    u = build_universe(hs)
    crit = CriteriaConfig(indicators=("StochK",), k_period=1)
    days = u.days[1:11]
    # Every day both stocks are eligible and the position closes next day, so
    # each run makes one trade per day with a fair coin between P and Q.
    up = [np.mean([h.close[i + 1] > h.close[i] for h in hs]) for i in range(1, 11)]
    expected = 100 * np.mean(up)
    res = random_baseline(u, days[0], days[-1], runs=1000, seed=0, criteria=crit)
    se = res.accuracy_std / np.sqrt(1000)
    assert abs(res.accuracy_mean - expected) < 3 * se + 1e-12
    assert res.accuracy_std == pytest.approx(np.std(res.accuracies))


def test_baseline_runs_validated(small_universe):
    with pytest.raises(ValueError):
        random_baseline(small_universe, small_universe.days[30], small_universe.days[-1], runs=0)


# Benchmark.
def test_benchmark_examples():
    idx = history_from_closes("IDX", np.linspace(100, 128.21, 20))
    days = idx.dates.astype(dt.date)
    assert benchmark_return(idx, days[0], days[-1]) == pytest.approx(28.21, abs=1e-9)
    flat = history_from_closes("IDX", [50.0] * 5)
    assert benchmark_return(flat, flat.dates[0], flat.dates[-1]) == 0.0
    three = history_from_closes("IDX", [100.0, 110.0, 99.0])
    assert benchmark_return(three, three.dates[0], three.dates[-1]) == pytest.approx(-1.0, abs=1e-12)


def test_benchmark_coverage():
    idx = history_from_closes("IDX", [100.0, 101.0], start=dt.date(2020, 1, 6))
    with pytest.raises(ValueError):
        benchmark_return(idx, dt.date(2020, 1, 1), dt.date(2020, 1, 7))


# Grid search.
def test_parse_range():
    assert parse_range("20:40:10") == [20, 30, 40]
    assert len(parse_range("20:400:10")) == len(DEFAULT_WINDOWS) == 39
    for bad in ("20:10:5", "a:b:c", "1:5:0", "20:40"):
        with pytest.raises(ValueError):
            parse_range(bad)


def test_grid_rows_replay(small_universe):
    u = small_universe
    start, end = u.days[20], u.days[-1]
    rows = grid_search(u, start, end, windows=parse_range("20:40:10"), seed=3)
    assert [r.window for r in rows] == [20, 30, 40]
    for r in rows:
        rep = run_backtest(u, start, end, confirm=ConfirmConfig(window_size=r.window, seed=3))
        assert (r.negotiations, r.profitable, r.accuracy, r.percentage_return) == \
               (len(rep.trades), rep.profitable, rep.accuracy, rep.percentage_return)
        assert (r.delays, r.neurons) == (6, 20)


# Histograms.
def test_histogram_rsi_25_example():
    h = history_from_closes("H", [20.0, 19.0, 18.0, 17.0, 18.0, 21.0])
    assert rsi_oracle(list(h.close), 4)[4] == 25.0
    u = build_universe([h])
    days = u.days
    hist = indicator_histograms(u, days[0], days[-1], bins={"RSI": range(0, 101, 10)},
                                criteria=CriteriaConfig(rsi_period=4))["RSI"]
    counts = [(b.low_edge, b.high, b.low) for b in hist if b.high or b.low]
    # The last bar has RSI defined but no next close, so it is skipped.
    assert counts == [(20.0, 1, 0)]


def test_histogram_recount():
    rng = np.random.default_rng(2)
    closes = 50 * np.exp(np.cumsum(rng.normal(0, 0.02, 115)))
    h = history_from_closes("H", closes)
    u = build_universe([h])
    edges = list(range(0, 101, 10))
    hist = indicator_histograms(u, u.days[0], u.days[-1], bins={"RSI": edges})["RSI"]
    rsi = rsi_oracle(list(closes), 14)
    high, low = [0] * 10, [0] * 10
    seen = 0
    for t in range(len(closes) - 1):
        if np.isnan(rsi[t]):
            continue
        seen += 1
        j = min(int(rsi[t] // 10), 9)
        if closes[t + 1] > closes[t]:
            high[j] += 1
        else:
            low[j] += 1
    assert seen == 100
    assert [b.high for b in hist] == high and [b.low for b in hist] == low


def test_histogram_skips_out_of_range_and_validates():
    h = history_from_closes("H", np.linspace(10, 20, 40))
    u = build_universe([h])
    hist = indicator_histograms(u, u.days[0], u.days[-1], bins={"CCI": [-50, 0, 50]})["CCI"]
    assert sum(b.high + b.low for b in hist) < 40 - 14
    with pytest.raises(ValueError):
        indicator_histograms(u, u.days[0], u.days[-1], bins={"RSI": [10, 5]})
