import datetime as dt

import numpy as np
import pytest

from hybridtrade.marketdata import PriceHistory, Universe
from hybridtrade.synthetic import business_days, make_universe

# Ranking example: 10 stocks x (RSI, %K, %D, CCI), all cost criteria.
TABLE6_LABELS = [f"Stock {c}" for c in "ABCDEFGHIJ"]
TABLE6 = np.array([
    [37.46, 7.43, 9.13, -86.35],
    [7.58, 3.48, 2.33, -166.79],
    [17.65, 5.41, 4.27, -150.15],
    [29.47, 14.29, 13.08, -105.43],
    [49.13, 10.80, 19.73, -65.99],
    [20.93, 8.62, 6.12, -97.30],
    [14.00, 4.80, 4.12, -106.82],
    [17.71, 1.09, 2.71, -194.24],
    [26.38, 4.52, 6.57, -98.28],
    [20.16, 4.16, 3.40, -154.57],
])
TABLE7_XI = [0.4049, 0.8660, 0.7336, 0.3179, 0.1231, 0.5285, 0.6578, 0.8847, 0.5632, 0.7590]
TABLE7_ORDER = [f"Stock {c}" for c in "HBJCGIFADE"]

# Worked confirmation example: 21 closes t-20..t.
TABLE9 = np.array([
    11.23, 10.57, 10.55, 11.32, 12.28, 13.63, 14.98, 15.87, 16.85, 14.41, 13.90,
    13.42, 13.30, 12.89, 12.92, 14.21, 14.86, 14.70, 14.52, 14.79, 13.54,
])
# Columns: normalized price, IMF1, IMF2, residuum.
TABLE10 = np.array([
    [0.1079, -0.4825, -0.0694, 0.6599],
    [0.0032, -0.5781, -0.0576, 0.6388],
    [0.0000, -0.5786, -0.0380, 0.6167],
    [0.1222, -0.4592, -0.0130, 0.5944],
    [0.2746, -0.3122, 0.0136, 0.5733],
    [0.4889, -0.1029, 0.0376, 0.5543],
    [0.7032, 0.1099, 0.0547, 0.5386],
    [0.8444, 0.2563, 0.0609, 0.5272],
    [1.0000, 0.4267, 0.0525, 0.5208],
    [0.6127, 0.0652, 0.0285, 0.5190],
    [0.5317, 0.0150, -0.0044, 0.5212],
    [0.4556, -0.0336, -0.0378, 0.5269],
    [0.4365, -0.0359, -0.0632, 0.5356],
    [0.3714, -0.1031, -0.0721, 0.5466],
    [0.3762, -0.1256, -0.0572, 0.5591],
    [0.5810, 0.0280, -0.0190, 0.5720],
    [0.6841, 0.0677, 0.0320, 0.5844],
    [0.6587, -0.0145, 0.0780, 0.5952],
    [0.6302, -0.0524, 0.0789, 0.6036],
    [0.6730, 0.0555, 0.0080, 0.6096],
    [0.4746, -0.0590, -0.0798, 0.6134],
])
TABLE12_FIRST = ([0.6599, 0.6388, 0.6167, 0.5944, 0.5733, 0.5543], 0.5386)
TABLE12_LAST = ([0.5591, 0.5720, 0.5844, 0.5952, 0.6036, 0.6096], 0.6134)
TEST_VECTOR = [0.5720, 0.5844, 0.5952, 0.6036, 0.6096, 0.6134]


def history_from_closes(symbol, closes, start=dt.date(2020, 1, 1), dates=None,
                        high_mult=1.01, low_mult=0.99):
    closes = np.asarray(closes, dtype=float)
    if dates is None:
        dates = business_days(start, len(closes))
    return PriceHistory(symbol, dates, closes, closes * high_mult, closes * low_mult,
                        closes, np.full(len(closes), 1000.0))


@pytest.fixture(scope="session")
def synthetic():
    """The 50 x 500 universe used by the acceptance criteria."""
    return make_universe(50, 500, seed=7)


@pytest.fixture(scope="session")
def small_universe():
    return make_universe(6, 120, seed=3)


@pytest.fixture
def trending_universe():
    """A rises 1%/day while B and C fall.

    A's highs are ten times its close, so its %K sits near 0; B and C close at
    their highs over deep lows, so theirs sit far above. A %K-only cost
    criterion therefore always picks A.
    """
    n = 40
    a = history_from_closes("A", 10.0 * 1.01 ** np.arange(n), high_mult=10.0, low_mult=1.0)
    b = history_from_closes("B", 10.0 * 0.99 ** np.arange(n), high_mult=1.0, low_mult=0.5)
    c = history_from_closes("C", 12.0 * 0.985 ** np.arange(n), high_mult=1.0, low_mult=0.5)
    return Universe({h.symbol: h for h in (a, b, c)})


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
