"""Empirical mode decomposition by envelope-mean sifting.

Envelopes are natural cubic splines through the local extrema, with the two
nearest extrema of each kind mirrored about each endpoint to tame the ends.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline


class TrendRemainder(ValueError):
    """Too few extrema to build envelopes: the series is monotone-like."""


@dataclass(frozen=True)
class SiftConfig:
    sd_threshold: float = 0.2
    max_sift: int = 10
    max_imfs: int = 16
    n_mirror: int = 2


def find_extrema(series) -> tuple[np.ndarray, np.ndarray]:
    """Indices of interior local maxima and minima.

    A flat run that rises on one side and falls on the other counts once, at
    its first sample. Runs touching either end never count.
    """
    s = np.asarray(series, dtype=float)
    if len(s) < 3:
        return np.array([], dtype=int), np.array([], dtype=int)
    starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
    vals = s[starts]
    if len(vals) < 3:
        return np.array([], dtype=int), np.array([], dtype=int)
    mid, left, right = vals[1:-1], vals[:-2], vals[2:]
    maxima = starts[1:-1][(mid > left) & (mid > right)]
    minima = starts[1:-1][(mid < left) & (mid < right)]
    return maxima, minima


def zero_crossings(series) -> int:
    s = np.sign(np.asarray(series, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _spline_through(series: np.ndarray, idx: np.ndarray, n_mirror: int) -> np.ndarray:
    n = len(series)
    k = min(n_mirror, len(idx))
    left = -idx[:k][::-1]
    right = 2 * (n - 1) - idx[-k:][::-1]
    pos = np.concatenate([left, idx, right]).astype(float)
    val = np.concatenate([series[idx[:k]][::-1], series[idx], series[idx[-k:]][::-1]])
    return CubicSpline(pos, val, bc_type="natural")(np.arange(n, dtype=float))


@dataclass(frozen=True)
class Envelope:
    upper: np.ndarray
    lower: np.ndarray

    @property
    def mean(self) -> np.ndarray:
        return (self.upper + self.lower) / 2.0


def envelope(series, n_mirror: int = 2) -> Envelope:
    s = np.asarray(series, dtype=float)
    maxima, minima = find_extrema(s)
    if len(maxima) < 2 or len(minima) < 2:
        raise TrendRemainder(f"{len(maxima)} maxima / {len(minima)} minima; need 2 of each")
    return Envelope(_spline_through(s, maxima, n_mirror), _spline_through(s, minima, n_mirror))


def sift_once(series, n_mirror: int = 2) -> np.ndarray:
    s = np.asarray(series, dtype=float)
    return s - envelope(s, n_mirror).mean


def is_imf_shape(series) -> bool:
    """Extrema and zero-crossing counts differ by at most one."""
    maxima, minima = find_extrema(series)
    return abs(len(maxima) + len(minima) - zero_crossings(series)) <= 1


def _extract(r: np.ndarray, config: SiftConfig) -> tuple[np.ndarray, str]:
    """Sift ``r`` into one IMF; also report which rule stopped the sifting."""
    h = r
    for _ in range(config.max_sift):
        try:
            nxt = sift_once(h, config.n_mirror)
        except TrendRemainder:
            return h, "exhausted"
        energy = float(np.sum(h * h))
        sd = float(np.sum((h - nxt) ** 2)) / energy if energy > 0 else 0.0
        h = nxt
        if sd < config.sd_threshold:
            return h, "sd"
        if is_imf_shape(h):
            return h, "shape"
    return h, "max_sift"


@dataclass(frozen=True)
class ImfSet:
    imfs: np.ndarray  # shape (k, n); k may be 0
    residuum: np.ndarray
    stops: tuple[str, ...] = ()

    @property
    def input_length(self) -> int:
        return len(self.residuum)

    def __len__(self) -> int:
        return len(self.imfs)

    def reconstruct(self) -> np.ndarray:
        return self.imfs.sum(axis=0) + self.residuum

    def to_csv(self, path, series) -> None:
        series = np.asarray(series, dtype=float)
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "input", *[f"imf{i + 1}" for i in range(len(self))], "residuum"])
            for i in range(self.input_length):
                w.writerow([i, repr(float(series[i])), *[repr(float(c[i])) for c in self.imfs],
                            repr(float(self.residuum[i]))])


def decompose(series, config: SiftConfig | None = None) -> ImfSet:
    """Split ``series`` into IMFs (fastest first) plus a trend residuum."""
    config = config or SiftConfig()
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < 4:
        raise ValueError("decompose needs a 1-D series of length >= 4")
    imfs, stops = [], []
    r = x.copy()
    while len(imfs) < config.max_imfs:
        maxima, minima = find_extrema(r)
        if len(maxima) < 2 or len(minima) < 2:
            break
        c, why = _extract(r, config)
        if not np.any(c):
            break
        imfs.append(c)
        stops.append(why)
        r = r - c
    stack = np.array(imfs) if imfs else np.empty((0, len(x)))
    return ImfSet(stack, x - stack.sum(axis=0), tuple(stops))
