"""Enumerate floors of the universal forest and report sizes and timings.

    python3 scripts/universal_floors.py --n 2 --budget 100000
"""

import argparse
import time

from lamtower.forest_kit import universal_forest, validate_forest_of_trees


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--budget", type=int, default=None)
    args = ap.parse_args()
    for n in range(args.n + 1):
        t0 = time.perf_counter()
        f = universal_forest(n, args.budget)
        dt = time.perf_counter() - t0
        sizes = [len(fl) for fl in f.forest.floors]
        ok = validate_forest_of_trees(f).ok
        print(f"n_max={n}: floor sizes {sizes}, valid={ok}, partial={f.partial}, {dt:.2f}s ({f.note})")
        if f.partial:
            break


if __name__ == "__main__":
    main()
