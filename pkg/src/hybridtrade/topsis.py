"""TOPSIS ranking by relative closeness to the ideal solution."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

METHODS = ("vector", "max_min", "max", "sum")


class TopsisError(ValueError):
    pass


class DegenerateColumn(TopsisError):
    def __init__(self, criterion: str, method: str):
        super().__init__(f"criterion {criterion!r} cannot be {method}-normalized")
        self.criterion = criterion
        self.method = method


@dataclass(frozen=True)
class CriterionSpec:
    name: str
    kind: str = "cost"
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in ("cost", "benefit"):
            raise TopsisError(f"criterion kind must be cost or benefit, got {self.kind!r}")
        if not self.weight >= 0:
            raise TopsisError(f"criterion {self.name!r} has negative weight")


@dataclass(frozen=True)
class DecisionMatrix:
    alternatives: tuple[str, ...]
    criteria: tuple[CriterionSpec, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        m, n = len(self.alternatives), len(self.criteria)
        if values.shape != (m, n):
            raise TopsisError(f"values shape {values.shape} != ({m}, {n})")
        if n < 1:
            raise TopsisError("need at least one criterion")
        if not np.isfinite(values).all():
            raise TopsisError("decision matrix has non-finite entries")
        if len(set(self.alternatives)) != m:
            raise TopsisError("alternative labels must be unique")
        total = sum(c.weight for c in self.criteria)
        if not np.isclose(total, 1.0, rtol=0, atol=1e-9):
            raise TopsisError(f"weights sum to {total}, expected 1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "criteria", tuple(self.criteria))

    @classmethod
    def build(cls, alternatives: Sequence[str], names: Sequence[str], values,
              kinds: str | Sequence[str] = "cost", weights=None) -> "DecisionMatrix":
        """Convenience constructor; weights default to equal shares."""
        n = len(names)
        if isinstance(kinds, str):
            kinds = [kinds] * n
        if weights is None:
            weights = [1.0 / n] * n
        crit = tuple(CriterionSpec(nm, k, float(w)) for nm, k, w in zip(names, kinds, weights))
        return cls(tuple(alternatives), crit, np.asarray(values, dtype=float))

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.criteria])

    @property
    def is_cost(self) -> np.ndarray:
        return np.array([c.kind == "cost" for c in self.criteria])


def normalize(matrix: DecisionMatrix, method: str = "vector") -> np.ndarray:
    x = matrix.values
    if method == "vector":
        denom = np.sqrt((x**2).sum(axis=0))
        bad = denom == 0
    elif method == "max_min":
        lo, hi = x.min(axis=0), x.max(axis=0)
        denom = hi - lo
        bad = denom == 0
    elif method == "max":
        denom = x.max(axis=0)
        bad = denom <= 0
    elif method == "sum":
        denom = x.sum(axis=0)
        bad = denom <= 0
    else:
        raise TopsisError(f"unknown normalization {method!r}; choose from {METHODS}")
    if bad.any():
        raise DegenerateColumn(matrix.criteria[int(np.argmax(bad))].name, method)
    if method == "max_min":
        return (x - lo) / denom
    return x / denom


@dataclass(frozen=True)
class Ranking:
    alternatives: tuple[str, ...]
    closeness: np.ndarray
    ranks: np.ndarray
    d_pos: np.ndarray
    d_neg: np.ndarray
    ideal: np.ndarray
    anti_ideal: np.ndarray

    @property
    def order(self) -> list[str]:
        """Alternatives from best (rank 1) to worst."""
        return [a for _, a in sorted(zip(self.ranks, self.alternatives))]

    @property
    def best(self) -> str:
        return self.order[0]

    def xi(self, alternative: str) -> float:
        return float(self.closeness[self.alternatives.index(alternative)])

    def rows(self) -> list[tuple[str, float, int]]:
        """``(alternative, xi, rank)`` sorted by rank."""
        out = [(a, float(x), int(r)) for a, x, r in zip(self.alternatives, self.closeness, self.ranks)]
        return sorted(out, key=lambda row: row[2])


def rank(matrix: DecisionMatrix, method: str = "vector") -> Ranking:
    m = len(matrix.alternatives)
    if m < 2:
        raise TopsisError("TOPSIS needs at least two alternatives")
    v = normalize(matrix, method) * matrix.weights
    cost = matrix.is_cost
    vmax, vmin = v.max(axis=0), v.min(axis=0)
    ideal = np.where(cost, vmin, vmax)
    anti = np.where(cost, vmax, vmin)
    d_pos = np.sqrt(((v - ideal) ** 2).sum(axis=1))
    d_neg = np.sqrt(((v - anti) ** 2).sum(axis=1))
    total = d_pos + d_neg
    if np.any(total == 0):
        # Only when every weighted column is constant.
        raise TopsisError("all alternatives coincide; closeness is undefined")
    xi = d_neg / total
    order = sorted(range(m), key=lambda i: (-xi[i], matrix.alternatives[i]))
    ranks = np.empty(m, dtype=int)
    ranks[order] = np.arange(1, m + 1)
    return Ranking(matrix.alternatives, xi, ranks, d_pos, d_neg, ideal, anti)
