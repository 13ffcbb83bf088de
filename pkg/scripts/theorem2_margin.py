"""Largest zero of the test sequences against the leading growth and the asymptotic bound.

Prints k, x_kk, the scaled margin (gamma k^s + 2 k^r - x_kk) k^{-1/3}, the
asymptotic bound and the largest real root of the sextic G.
"""

import argparse

from turankit.errors import DomainError
from turankit.gpoly import g_poly_bound
from turankit.recurrence import test_sequences
from turankit.spectra import extreme_zeros, thm2_bound, thm2_delta_cap


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--s", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--delta", type=float, default=None, help="default: 90%% of the admissible cap")
    ap.add_argument("--ks", type=int, nargs="+", default=[100, 200, 500, 1000, 2000, 5000])
    args = ap.parse_args()

    spec, params = test_sequences(args.r, args.s, args.gamma)
    delta = args.delta if args.delta is not None else 0.9 * thm2_delta_cap(params)
    print(f"# r={args.r} s={args.s} gamma={args.gamma} delta={delta:.6g}")
    print(f"{'k':>7} {'x_kk':>16} {'margin':>10} {'asymptotic':>16} {'G root':>16}")
    for k in args.ks:
        xkk = extreme_zeros(spec, k).x_kk
        lead = args.gamma * k**args.s + 2 * k**args.r
        bound = thm2_bound(params, k, delta)
        try:
            groot = f"{g_poly_bound(params, k).largest_root:16.6f}"
        except DomainError:
            groot = f"{'n/a':>16}"
        print(f"{k:7d} {xkk:16.6f} {(lead - xkk) * k ** (-1 / 3):10.5f} {bound:16.6f} {groot}")


if __name__ == "__main__":
    main()
