"""Lift spectra of the four second-curve constructions for a range of N.

Prints one row per (case, N) with the spectra, the witnesses found by the
search and the time spent, then the product-cover driver for cases 1, 3, 4.
"""

import argparse
import time

from lamtower import cover_lab as cl


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=10)
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()
    print(f"{'case':>4} {'N':>3}  {'alpha':<12} {'beta':<22} {'ok':<3} {'ms':>7}  witness")
    for case in (1, 2, 3, 4):
        for N in range(cl.MIN_N[case], args.max_n + 1):
            t0 = time.perf_counter()
            cc = cl.build_case(case, N, args.seed)
            ms = 1000 * (time.perf_counter() - t0)
            r = cc.report
            gens = [g for g in cc.cover.alphabet if g != "a"]
            wit = " ".join(f"{g}={cc.cover.sigma(g)}" for g in gens) if case in (3, 4) else ""
            print(f"{case:>4} {N:>3}  {str(r.alpha_spectrum):<12} {str(r.beta_spectrum):<22} "
                  f"{'yes' if r.ok else 'NO':<3} {ms:7.2f}  {wit}")
    for N in (5, 6):
        print("\n".join(cl.second_systole_driver([(1, None), (3, None), (4, None)], N).lines()))


if __name__ == "__main__":
    main()
