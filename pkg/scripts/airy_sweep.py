"""Relative error of the two-term Airy prediction for the j-th largest zero of a power-law family."""

import argparse

from turankit.airy import airy_validate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--r", type=float, default=0.5)
    ap.add_argument("--ks", type=int, nargs="+", default=[25, 100, 400, 1600, 6400])
    ap.add_argument("--js", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()

    print(f"{'k':>6} {'j':>2} {'predicted':>14} {'measured':>14} {'rel_error':>11}")
    for k in args.ks:
        for j in args.js:
            p = airy_validate(args.c, args.r, k, j)
            print(f"{k:6d} {j:2d} {p.predicted:14.6f} {p.measured:14.6f} {p.rel_error:11.3e}")


if __name__ == "__main__":
    main()
