"""Extreme learning machine: random sigmoid hidden layer, least-squares output.

Hidden weights and biases are drawn uniformly from [-1, 1) with numpy's
PCG64 bit generator (``numpy.random.default_rng``), so a seed pins the whole
model on every platform numpy supports. Output weights are the minimum-norm
least-squares solution, computed through a truncated SVD.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.special import expit

RCOND = 1e-12


@dataclass(frozen=True)
class TrainingSet:
    X: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        T = np.asarray(self.T, dtype=float).reshape(-1)
        if X.shape[0] != T.shape[0]:
            raise ValueError(f"{X.shape[0]} input rows but {T.shape[0]} targets")
        if X.shape[0] < 1:
            raise ValueError("training set is empty")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "T", T)


@dataclass(frozen=True)
class ElmModel:
    input_dim: int
    hidden_count: int
    weights: np.ndarray  # (hidden_count, input_dim)
    biases: np.ndarray  # (hidden_count,)
    seed: int | None = None
    beta: np.ndarray | None = None

    @property
    def trained(self) -> bool:
        return self.beta is not None


def init_model(input_dim: int, hidden_count: int, seed: int) -> ElmModel:
    if input_dim < 1 or hidden_count < 1:
        raise ValueError("input_dim and hidden_count must be >= 1")
    rng = np.random.default_rng(seed)
    w = rng.uniform(-1.0, 1.0, size=(hidden_count, input_dim))
    b = rng.uniform(-1.0, 1.0, size=hidden_count)
    return ElmModel(input_dim, hidden_count, w, b, seed)


def hidden_matrix(model: ElmModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.input_dim:
        raise ValueError(f"expected {model.input_dim} input columns, got {X.shape[1]}")
    return expit(X @ model.weights.T + model.biases)


def min_norm_lstsq(H: np.ndarray, T: np.ndarray, rcond: float = RCOND) -> np.ndarray:
    """``pinv(H) @ T`` with singular values below ``rcond * s_max`` dropped."""
    U, s, Vt = np.linalg.svd(H, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros(H.shape[1])
    keep = s > rcond * s[0]
    coef = (U[:, keep].T @ T) / s[keep]
    return Vt[keep].T @ coef


def train(model: ElmModel, data: TrainingSet) -> ElmModel:
    H = hidden_matrix(model, data.X)
    if not (np.isfinite(H).all() and np.isfinite(data.T).all()):
        raise ValueError("non-finite values in hidden matrix or targets")
    return replace(model, beta=min_norm_lstsq(H, data.T))


def predict_many(model: ElmModel, X) -> np.ndarray:
    if not model.trained:
        raise RuntimeError("model has not been trained")
    return hidden_matrix(model, X) @ model.beta


def predict(model: ElmModel, x) -> float:
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(predict_many(model, x)[0])


def dump_model(model: ElmModel, path) -> None:
    """Write seed, dimensions and output weights as JSON for auditing."""
    doc = {
        "seed": model.seed,
        "input_dim": model.input_dim,
        "hidden_count": model.hidden_count,
        "beta": None if model.beta is None else [float(v) for v in model.beta],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_model(path) -> ElmModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("seed") is None:
        raise ValueError("model dump has no seed; hidden layer cannot be rebuilt")
    model = init_model(doc["input_dim"], doc["hidden_count"], doc["seed"])
    if doc.get("beta") is not None:
        model = replace(model, beta=np.asarray(doc["beta"], dtype=float))
    return model
