"""Grid check that every passing certificate's Turan operator is nonnegative where it is claimed.

For each test-sequence family and degree, runs the balanced T2, symmetric T4,
symmetric S4 and right-tail T4 certificates and, when one passes, counts
negative signs on a 1001-point grid over its region.
"""

import argparse
import math

import numpy as np

from turankit.certify import certify_S4_sym_thm9, certify_T2_thm5, certify_T4_sym_thm7, certify_T4_thm10
from turankit.evalkernel import turan_grid
from turankit.recurrence import BALANCED, MONIC, ORTHONORMAL, custom_family, test_sequence_params, test_sequences
from turankit.spectra import extreme_zeros, gershgorin_interval


def sweep(r, s, gamma, k, points):
    spec, _ = test_sequences(r, s, gamma)
    a, b, _ = spec.coefficients(k + 3)
    lo, hi = gershgorin_interval(spec, k + 1)
    X = max(abs(lo), abs(hi)) + 2.0
    out = {}

    bal = spec.with_normalization(BALANCED)
    if certify_T2_thm5(bal, k, "balanced").passed:
        x = np.linspace(lo, hi, points)
        out["T2 balanced"] = sum(int(np.sum(turan_grid(bal, "T2", i, x).sign < 0)) for i in range(1, k + 1))
    else:
        out["T2 balanced"] = None

    sym = custom_family(a, np.zeros_like(b), normalization=MONIC)
    xs = np.linspace(-X, X, points)
    out["T4 symmetric"] = int(np.sum(turan_grid(sym, "T4", k, xs).sign < 0)) if certify_T4_sym_thm7(sym, k).passed else None
    orth = sym.with_normalization(ORTHONORMAL)
    out["S4 symmetric"] = int(np.sum(turan_grid(orth, "S4", k, xs).sign < 0)) if certify_S4_sym_thm9(orth, k).passed else None

    if certify_T4_thm10(spec, k).passed:
        start = max(extreme_zeros(spec, k).x_kk, b[k] + a[k])
        x = np.linspace(start, X, points + 1)[1:]
        out["T4 right tail"] = int(np.sum(turan_grid(spec, "T4", k, x).sign < 0))
    else:
        out["T4 right tail"] = None
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ks", type=int, nargs="+", default=[5, 10, 25, 50, 100])
    ap.add_argument("--points", type=int, default=1001)
    ap.add_argument("--gamma-fraction", type=float, default=0.9)
    args = ap.parse_args()

    print("# entries: negative grid points (fail = certificate did not pass)")
    for r in (1, 2):
        for s in sorted({0, 1, r}):
            p = test_sequence_params(r, s, 1.0)
            gamma = args.gamma_fraction * p.gamma_max if math.isfinite(p.gamma_max) else 1.0
            for k in args.ks:
                res = sweep(r, s, gamma, k, args.points)
                cells = "  ".join(f"{name}={'fail' if v is None else v}" for name, v in res.items())
                print(f"r={r} s={s} gamma={gamma:.4g} k={k:4d}  {cells}")


if __name__ == "__main__":
    main()
