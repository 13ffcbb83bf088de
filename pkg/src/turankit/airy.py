"""Airy function ``Ai`` on the real line and the edge asymptotics of power-law zeros."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .recurrence import MONIC, build_family

_C1 = 0.355028053887817239  # Ai(0)
_C2 = 0.258819403792806798  # -Ai'(0)
_SERIES_RADIUS = 6.0
_ASYM_TERMS = 8
ZERO_TOL = 1e-10
MAX_ZERO_INDEX = 20


def _u(k: int) -> float:
    # u_k = Gamma(3k + 1/2) / (54^k k! Gamma(k + 1/2))
    return math.exp(math.lgamma(3 * k + 0.5) - k * math.log(54) - math.lgamma(k + 1) - math.lgamma(k + 0.5))


_U = [_u(k) for k in range(2 * _ASYM_TERMS + 2)]


def _series(z: float) -> float:
    z3 = z**3
    f = t = 1.0
    g = u = z
    k = 1
    while True:
        t *= z3 / ((3 * k - 1) * (3 * k))
        u *= z3 / ((3 * k) * (3 * k + 1))
        f += t
        g += u
        if abs(t) + abs(u) < 1e-18 * (abs(f) + abs(g)):
            return _C1 * f - _C2 * g
        k += 1


def _asymptotic(z: float) -> float:
    if z > 0:
        zeta = 2 / 3 * z**1.5
        s = sum((-1) ** k * _U[k] * zeta ** (-k) for k in range(_ASYM_TERMS))
        return math.exp(-zeta) / (2 * math.sqrt(math.pi) * z**0.25) * s
    x = -z
    zeta = 2 / 3 * x**1.5
    ph = zeta + math.pi / 4
    even = sum((-1) ** k * _U[2 * k] * zeta ** (-2 * k) for k in range(_ASYM_TERMS))
    odd = sum((-1) ** k * _U[2 * k + 1] * zeta ** (-2 * k - 1) for k in range(_ASYM_TERMS))
    return (math.sin(ph) * even - math.cos(ph) * odd) / (math.sqrt(math.pi) * x**0.25)


def airy_ai(z):
    """``Ai(z)``: Maclaurin series for ``|z| <= 6``, asymptotic expansions beyond."""
    f = np.vectorize(lambda v: _series(v) if abs(v) <= _SERIES_RADIUS else _asymptotic(v), otypes=[float])
    out = f(np.asarray(z, dtype=float))
    return float(out) if np.ndim(z) == 0 else out


def airy_zero(j: int) -> float:
    """``j``-th positive zero ``i_j`` of ``Ai(-x)``."""
    if not 1 <= j <= MAX_ZERO_INDEX:
        raise DomainError(f"airy zero index must lie in 1..{MAX_ZERO_INDEX}")
    # zeros are at least ~pi/sqrt(x) apart; half-unit steps never skip one for j <= 20
    step, x, found = 0.5, 0.0, 0
    fx = airy_ai(-x)
    while True:
        y = x + step
        fy = airy_ai(-y)
        if fx * fy < 0:
            found += 1
            if found == j:
                break
        x, fx = y, fy
    lo, hi, flo = x, y, fx
    while hi - lo > ZERO_TOL:
        mid = 0.5 * (lo + hi)
        fm = airy_ai(-mid)
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class AiryPrediction:
    c: float
    r: float
    k: int
    j: int
    airy_zero: float
    predicted: float
    measured: float

    @property
    def rel_error(self) -> float:
        return abs(self.predicted - self.measured) / abs(self.measured)

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "r": self.r,
            "k": self.k,
            "j": self.j,
            "airy_zero": self.airy_zero,
            "predicted": self.predicted,
            "measured": self.measured,
            "rel_error": self.rel_error,
        }


def airy_prediction(c: float, r: float, k: int, j: int) -> float:
    """Leading edge asymptotics of the ``j``-th largest zero for ``a_k = c k^r``, ``b = 0``."""
    ij = airy_zero(j)
    return 2 * c * k**r * (1 - r ** (2 / 3) * 6 ** (-1 / 3) * ij * k ** (-2 / 3))


def airy_validate(c: float, r: float, k: int, j: int = 1) -> AiryPrediction:
    """Compare the edge asymptotics with the ``j``-th largest zero (``j = 1`` is ``x_kk``)."""
    from .spectra import zero_by_index

    if not (c > 0 and 0 < r < 1):
        raise DomainError("need c > 0 and 0 < r < 1")
    if not 1 <= j < k:
        raise DomainError("need 1 <= j < k")
    spec = build_family("hermite-like", {"c": c, "r": r}, MONIC)
    measured = zero_by_index(spec, k, k - j + 1)
    return AiryPrediction(c, r, k, j, airy_zero(j), airy_prediction(c, r, k, j), measured)
