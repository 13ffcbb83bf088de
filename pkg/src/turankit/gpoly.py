"""Largest real root of the sextic ``G = 4 K0 K2 - K1^2`` for test sequences.

Right of that root the quadratic in ``t = p_k/p_{k+1}`` has negative
discriminant, which forces ``T4(p_k) > 0``; the root is therefore an upper
bound candidate for the largest zero at degree ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AnomalyError, DomainError
from .evalkernel import kform_coefficients
from .recurrence import ORTHONORMAL, TestSequenceParams, test_sequences

SCAN_CELLS = 10_000
ROOT_RTOL = 1e-12


@dataclass(frozen=True)
class GPolyBound:
    params: TestSequenceParams
    k: int
    coefficients: np.ndarray  # highest degree first
    roots: np.ndarray  # real roots found by sign change, ascending
    residuals: np.ndarray  # |G(root)| / sum |c_i| |root|^i

    @property
    def largest_root(self) -> float:
        return float(self.roots[-1])

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "k": self.k,
            "coefficients": self.coefficients,
            "roots": self.roots,
            "residuals": self.residuals,
            "largest_root": self.largest_root,
        }


def fujiwara_radius(coef: np.ndarray) -> float:
    """Upper bound on the modulus of every root."""
    c = np.trim_zeros(np.asarray(coef, dtype=float), "f")
    n = c.size - 1
    if n < 1:
        raise AnomalyError("constant polynomial has no roots")
    ratios = np.abs(c[1:] / c[0])
    ratios[-1] /= 2
    return 2 * float(max(r ** (1 / (i + 1)) for i, r in enumerate(ratios)))


def _relative_value(coef, x):
    powers = np.abs(x) ** np.arange(coef.size - 1, -1, -1)
    return abs(np.polyval(coef, x)) / float(np.sum(np.abs(coef) * powers))


def real_roots(coef: np.ndarray, cells: int = SCAN_CELLS) -> np.ndarray:
    """Real roots at sign changes on a uniform scan of the Fujiwara interval, bisected."""
    coef = np.trim_zeros(np.asarray(coef, dtype=float), "f")
    R = fujiwara_radius(coef)
    xs = np.linspace(-R, R, cells + 1)
    vs = np.polyval(coef, xs)
    roots = list(xs[vs == 0.0])
    for i in np.nonzero(vs[:-1] * vs[1:] < 0)[0]:
        lo, hi, flo = xs[i], xs[i + 1], vs[i]
        while hi - lo > ROOT_RTOL * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            fm = np.polyval(coef, mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm < 0) == (flo < 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return np.sort(np.array(roots, dtype=float))


def g_poly_bound(params: TestSequenceParams, k: int) -> GPolyBound:
    """Real roots of ``G`` at degree ``k`` built from the test-sequence coefficients.

    Needs ``s < r + 1/2`` when ``s > r``; outside that range the sextic is
    not known to control ``T4``.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if params.s > params.r and not params.s < params.r + 0.5:
        raise DomainError(f"s={params.s} outside the range s < r + 1/2 needed for the sextic bound")
    spec, _ = test_sequences(params.r, params.s, params.gamma, ORTHONORMAL)
    a, b, _ = spec.coefficients(k + 2)
    G = kform_coefficients(a, b, k).G()
    roots = real_roots(G)
    if roots.size == 0:
        raise AnomalyError(f"G has no real root at k={k}")
    res = np.array([_relative_value(G, x) for x in roots])
    return GPolyBound(params, k, G, roots, res)
