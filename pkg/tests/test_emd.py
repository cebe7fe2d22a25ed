import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hybridtrade.emd import (
    SiftConfig,
    TrendRemainder,
    decompose,
    envelope,
    find_extrema,
    is_imf_shape,
    sift_once,
    zero_crossings,
)

from conftest import TABLE9, TABLE10


def brute_extrema(s):
    """Strict three-point scan; only valid for series without repeated values."""
    mx = [i for i in range(1, len(s) - 1) if s[i] > s[i - 1] and s[i] > s[i + 1]]
    mn = [i for i in range(1, len(s) - 1) if s[i] < s[i - 1] and s[i] < s[i + 1]]
    return mx, mn


def normalized_table9():
    return (TABLE9 - TABLE9.min()) / (TABLE9.max() - TABLE9.min())


def test_single_peak():
    mx, mn = find_extrema([0.0, 1.0, 0.0])
    assert list(mx) == [1] and list(mn) == []


def test_monotone_has_no_extrema():
    mx, mn = find_extrema(np.arange(10.0))
    assert len(mx) == 0 and len(mn) == 0


def test_sine_extrema_match_scan():
    s = np.sin(np.linspace(0, 6 * np.pi, 97) + 0.3)
    mx, mn = find_extrema(s)
    bmx, bmn = brute_extrema(s)
    assert list(mx) == bmx and list(mn) == bmn
    assert len(mx) == 3 and len(mn) == 3


@pytest.mark.parametrize("series, maxima, minima", [
    ([0, 1, 1, 0], [1], []),
    ([0, 1, 1, 2], [], []),
    ([3, 1, 1, 3, 2], [3], [1]),
    ([1, 1, 0, 2, 2], [], [2]),
])
def test_plateaus(series, maxima, minima):
    mx, mn = find_extrema(np.array(series, dtype=float))
    assert list(mx) == maxima and list(mn) == minima


@settings(max_examples=80, deadline=None)
@given(arrays(np.float64, st.integers(3, 60), elements=st.floats(-1e3, 1e3), unique=True))
def test_extrema_match_scan_on_distinct_values(s):
    mx, mn = find_extrema(s)
    assert (list(mx), list(mn)) == brute_extrema(s)


def test_zero_crossings():
    assert zero_crossings([1, -1, 1, -1]) == 3
    assert zero_crossings([1, 0, -1]) == 1
    assert zero_crossings([1, 0, 1]) == 0


def test_envelope_brackets_sinusoid():
    t = np.arange(200)
    s = np.sin(2 * np.pi * t / 25) * (1 + 0.3 * np.sin(2 * np.pi * t / 200))
    env = envelope(s)
    assert np.all(env.upper >= env.lower)
    assert np.all(env.upper[10:-10] >= s[10:-10] - 1e-9)
    assert np.all(env.lower[10:-10] <= s[10:-10] + 1e-9)


def test_sift_leaves_pure_sine_alone():
    x = np.sin(2 * np.pi * 4 * np.arange(200) / 200)
    h = sift_once(x)
    assert np.abs(h - x)[20:180].max() < 0.05


def test_sift_needs_two_of_each():
    with pytest.raises(TrendRemainder):
        sift_once([0.0, 1.0, 0.0, 0.5, 0.4])


def test_sift_removes_ramp():
    t = np.arange(300, dtype=float)
    x = 0.01 * t + np.sin(2 * np.pi * t / 20)
    h = sift_once(x)
    slope = np.polyfit(t[30:270], h[30:270], 1)[0]
    assert abs(slope) < 0.1 * 0.01


def test_sifting_shrinks_envelope_mean_on_average():
    rng = np.random.default_rng(5)
    before, after = [], []
    for _ in range(50):
        x = rng.normal(size=120).cumsum()
        h = sift_once(x)
        try:
            after.append(np.mean(np.abs(envelope(h).mean)))
        except TrendRemainder:
            continue
        before.append(np.mean(np.abs(envelope(x).mean)))
    assert np.mean(after) < np.mean(before)


def test_monotone_gives_trend_only():
    x = np.linspace(1, 5, 30) ** 2
    res = decompose(x)
    assert len(res) == 0
    assert np.array_equal(res.residuum, x)


def test_table9_window_reconstructs():
    x = normalized_table9()
    np.testing.assert_allclose(x, TABLE10[:, 0], atol=5e-5)
    res = decompose(x)
    assert np.abs(res.reconstruct() - x).max() < 1e-9
    assert len(res) >= 1


def test_table10_rows_sum_to_input():
    # Sanity check on the transcribed golden table itself.
    np.testing.assert_allclose(TABLE10[:, 1:].sum(axis=1), TABLE10[:, 0], atol=5e-4)


def test_two_tone_first_imf_is_fast_tone():
    t = np.linspace(0, 1, 256)
    fast = np.sin(2 * np.pi * 10 * t)
    res = decompose(fast + np.sin(2 * np.pi * t))
    lo, hi = int(0.1 * 256), int(0.9 * 256)
    assert np.corrcoef(res.imfs[0][lo:hi], fast[lo:hi])[0, 1] > 0.95


@pytest.mark.parametrize("seed", range(5))
def test_imfs_get_slower(seed):
    x = np.random.default_rng(seed).normal(size=300).cumsum()
    res = decompose(x)
    counts = [zero_crossings(c) for c in res.imfs]
    assert counts == sorted(counts, reverse=True)


@pytest.mark.parametrize("seed", range(5))
def test_accepted_imfs_meet_stop_rule(seed):
    x = np.random.default_rng(seed).normal(size=200).cumsum()
    cfg = SiftConfig()
    res = decompose(x, cfg)
    assert len(res.stops) == len(res)
    for c, why in zip(res.imfs, res.stops):
        assert why in ("sd", "shape", "max_sift", "exhausted")
        if why == "shape":
            assert is_imf_shape(c)


def test_deterministic():
    x = np.random.default_rng(9).normal(size=150).cumsum()
    a, b = decompose(x), decompose(x)
    assert np.array_equal(a.imfs, b.imfs) and np.array_equal(a.residuum, b.residuum)


def test_reconstruction_200_random_series():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(20, 400))
        x = rng.normal(size=n).cumsum() + rng.normal(scale=0.3, size=n)
        res = decompose(x)
        worst = max(worst, float(np.abs(res.reconstruct() - x).max()))
    assert worst < 1e-9


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(4, 120), elements=st.floats(-100, 100)))
def test_reconstruction_property(x):
    res = decompose(x)
    assert np.abs(res.reconstruct() - x).max() < 1e-9


def test_too_short():
    with pytest.raises(ValueError):
        decompose([1.0, 2.0, 1.0])


def test_csv(tmp_path):
    x = normalized_table9()
    res = decompose(x)
    res.to_csv(tmp_path / "d.csv", x)
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0].startswith("index,input,imf1") and lines[0].endswith(",residuum")
    assert len(lines) == 22
