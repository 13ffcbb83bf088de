"""Largest constant chain sequence of each length, by bisection, against the secant closed form."""

import argparse
import math

import numpy as np

from turankit.certify import chain_sequence_test, constant_chain_threshold


def bisect_threshold(n, tol=1e-14):
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if chain_sequence_test(np.full(n, mid)).is_chain:
            lo = mid
        else:
            hi = mid
    return lo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", type=int, nargs="+", default=[1, 2, 3, 5, 10, 20, 100, 1000])
    args = ap.parse_args()

    print(f"{'n':>6} {'bisection':>20} {'closed form':>20} {'diff':>10}")
    for n in args.ns:
        got = bisect_threshold(n)
        want = constant_chain_threshold(n)
        print(f"{n:6d} {got:20.15f} {want:20.15f} {abs(got - want):10.2e}")
    g = np.full(10_000, 0.25)
    g[0] = 0.5
    v = chain_sequence_test(g)
    print(f"(1/2, 1/4, 1/4, ...) of length {g.size}: chain={v.is_chain} last parameter={v.minimal_params[-1]:.6f}")
    print(f"limit 1/4 sec^2(pi/(n+2)) -> 1/4: n=10^6 gives {0.25 / math.cos(math.pi / 1_000_002) ** 2:.12f}")


if __name__ == "__main__":
    main()
