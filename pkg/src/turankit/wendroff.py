"""Recurrence coefficients of a monic family with two prescribed zero sets.

Given interlacing zeros of ``q_N`` and ``q_{N-1}``, the monic recurrence
``q_{m} = (x - b_{m-1}) q_{m-1} - a_{m-1}^2 q_{m-2}`` is run backwards: the
``x^{m-1}`` coefficient fixes ``b_{m-1}`` and the remainder
``(x - b_{m-1}) q_{m-1} - q_m`` is ``a_{m-1}^2`` times the monic ``q_{m-2}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InstabilityError
from .recurrence import MONIC, RecurrenceSpec, custom_family

MAX_N = 20


@dataclass(frozen=True)
class WendroffTable:
    N: int
    a2: np.ndarray  # a_0^2 .. a_{N-1}^2, a_0^2 = 0
    b: np.ndarray  # b_0 .. b_{N-1}
    residual: float  # relative coefficient mismatch of regenerated q_N
    zero_residual: float  # largest |zero of regenerated q_N - input zero|

    @property
    def a(self) -> np.ndarray:
        return np.sqrt(self.a2)

    def to_spec(self, tail: tuple[float, float] | None = None, extra: int = 2, normalization=MONIC) -> RecurrenceSpec:
        """Finite-table spec; ``tail = (a, b)`` pads ``extra`` indices beyond ``N-1``.

        Turan operators at degree ``k`` need coefficients through ``k + 2``;
        the family above ``N`` is free, so any positive tail is admissible.
        """
        a = list(self.a)
        b = list(self.b)
        if tail is not None:
            ta, tb = tail
            if ta <= 0:
                raise DomainError("tail a must be positive")
            a += [float(ta)] * extra
            b += [float(tb)] * extra
        return custom_family(a, b, normalization=normalization)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "a2": self.a2,
            "b": self.b,
            "residual": self.residual,
            "zero_residual": self.zero_residual,
        }


def _check_interlacing(xs: np.ndarray, ys: np.ndarray):
    if xs.ndim != 1 or ys.ndim != 1 or ys.size != xs.size - 1:
        raise DomainError("need N zeros and N-1 interlacing zeros")
    if xs.size < 1 or xs.size > MAX_N:
        raise DomainError(f"N must lie in 1..{MAX_N}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise DomainError("zeros must be finite")
    if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
        raise DomainError("zeros must be strictly increasing")
    for i in range(ys.size):
        if not xs[i] < ys[i] < xs[i + 1]:
            raise DomainError(f"interlacing fails at position {i + 1}: need x_{i + 1} < y_{i + 1} < x_{i + 2}")


def _regenerate(a2: np.ndarray, b: np.ndarray) -> np.ndarray:
    prev, cur = np.zeros(1), np.ones(1)
    for m in range(1, b.size + 1):
        nxt = np.polysub(np.polymul([1.0, -b[m - 1]], cur), a2[m - 1] * prev)
        prev, cur = cur, nxt
    return cur


def wendroff_extend(xs, ys) -> WendroffTable:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    _check_interlacing(xs, ys)
    N = xs.size
    q_hi = np.poly(xs)
    q_lo = np.poly(ys) if N > 1 else np.ones(1)
    a2 = np.zeros(N)
    b = np.zeros(N)
    for m in range(N, 1, -1):
        # q_hi has degree m, q_lo degree m-1, both monic
        bm = q_lo[1] - q_hi[1]
        rem = np.polysub(np.polymul([1.0, -bm], q_lo), q_hi)[2:]  # degree m-2
        lead = rem[0]
        # size of the terms cancelling into the leading remainder coefficient
        scale = max(abs(q_lo[2]) if m > 2 else 1.0, abs(bm * q_lo[1]), abs(q_hi[2]))
        if not lead > 64 * np.finfo(float).eps * scale:
            raise InstabilityError(f"recovered a_{m - 1}^2 = {lead:.3e} is not positive at level m={m}")
        b[m - 1] = bm
        a2[m - 1] = lead
        q_hi, q_lo = q_lo, rem / lead
    b[0] = -q_hi[1]
    b = b + 0.0  # no negative zeros in reports
    regen = _regenerate(a2, b)
    target = np.poly(xs)
    residual = float(np.max(np.abs(regen - target)) / np.max(np.abs(target)))
    J = np.diag(b) + np.diag(np.sqrt(a2[1:]), 1) + np.diag(np.sqrt(a2[1:]), -1)
    zero_residual = float(np.max(np.abs(np.linalg.eigvalsh(J) - xs)))
    return WendroffTable(N=N, a2=a2, b=b, residual=residual, zero_residual=zero_residual)
