"""Walk through one decision by hand: ranking, then trend confirmation.

Uses the ten-stock ranking example and the 21-price confirmation window
bundled with the tests.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from conftest import TABLE6, TABLE6_LABELS, TABLE9  # noqa: E402

from hybridtrade import elm  # noqa: E402
from hybridtrade.emd import decompose  # noqa: E402
from hybridtrade.strategy import classify_trend, embed_delays, window_normalize  # noqa: E402
from hybridtrade.topsis import DecisionMatrix, rank  # noqa: E402


def main():
    np.set_printoptions(precision=4, suppress=True)
    matrix = DecisionMatrix.build(TABLE6_LABELS, ["RSI", "StochK", "StochD", "CCI"], TABLE6)
    ranking = rank(matrix, "max_min")
    print("stock      xi      rank")
    for alt, xi, r in ranking.rows():
        print(f"{alt:<10} {xi:.4f}  {r}")

    normalized = window_normalize(TABLE9)
    parts = decompose(normalized)
    print(f"\nnormalized window: {normalized}")
    print(f"IMFs extracted: {len(parts)} (stops: {', '.join(parts.stops)})")
    print(f"residuum: {parts.residuum}")

    train_set, test = embed_delays(parts.residuum, 6)
    model = elm.train(elm.init_model(6, 20, seed=0), train_set)
    y = elm.predict(model, test)
    last = parts.residuum[-1]
    print(f"\n{len(train_set.T)} training rows; test vector {test}")
    print(f"prediction {y:.4f} vs last residuum {last:.4f} -> {classify_trend(y, last).value}")


if __name__ == "__main__":
    main()
