"""Write the bundled synthetic dataset: 50 stocks x 500 business days plus an index."""

import argparse
from pathlib import Path

from hybridtrade.synthetic import make_universe, write_universe


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Path(__file__).resolve().parents[1] / "data" / "synthetic")
    ap.add_argument("--stocks", type=int, default=50)
    ap.add_argument("--days", type=int, default=500)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    universe, index = make_universe(args.stocks, args.days, args.seed, with_index=True)
    write_universe(universe, args.out, index)
    print(f"wrote {len(universe.symbols)} stocks + {index.symbol} to {args.out}")


if __name__ == "__main__":
    main()
