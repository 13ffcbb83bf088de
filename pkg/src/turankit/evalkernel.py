"""Overflow-safe polynomial windows, Turan-type operators and K-quadratics.

All polynomial values are carried as :class:`~turankit.scaled.ScaledArray`
so families whose values leave the double range (q-families) can be scanned.
Every function accepts a scalar or a 1-d array of evaluation points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .ddarith import DDArray
from .errors import DomainError, SingularityError
from .recurrence import ORTHONORMAL, RecurrenceSpec
from .scaled import ScaledArray, ScaledReal, scaled_max_abs, scaled_sum

# the live pair is rescaled once its binary exponent leaves [-64, 64]
RESCALE_BITS = 64
SIGN_BAND = 1e-13
EXACT_MAX_DEGREE = 30


@dataclass(frozen=True)
class PolyWindow:
    """Values ``p_{k-2} .. p_{k+2}`` at the points ``x``.

    ``values`` has shape ``(5, len(x))``; row ``j`` holds ``p_{k-2+j}``.
    Indices below zero hold exact zeros.
    """

    k: int
    x: np.ndarray
    values: ScaledArray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def p(self, j: int) -> ScaledArray:
        off = j - self.k + 2
        if not 0 <= off < 5:
            raise DomainError(f"index {j} outside the window around {self.k}")
        return self.values[off]

    def t(self) -> np.ndarray:
        """``t_k = p_k / p_{k+1}`` as doubles."""
        return (self.p(self.k) / self.p(self.k + 1)).to_float()

    def residuals(self) -> np.ndarray:
        """Relative recurrence residual of each triple ending in the window, shape (3, n)."""
        out = []
        for j in range(self.k, self.k + 3):
            if j < 1:
                out.append(np.zeros_like(self.x))
                continue
            a, b, c = self.a, self.b, self.c
            lhs = (a[j] / c[j]) * self.p(j)
            t1 = (self.x - b[j - 1]) * self.p(j - 1)
            t2 = (a[j - 1] * c[j - 1]) * self.p(j - 2) if j >= 2 else ScaledArray(np.zeros_like(self.x))
            res = lhs - t1 + t2
            scale = scaled_max_abs([lhs, t1, t2])
            with np.errstate(invalid="ignore", divide="ignore"):
                rel = (abs(res) / scale).to_float()
            out.append(np.where(scale.m == 0.0, 0.0, rel))
        return np.array(out)


def _as_points(x) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if xs.ndim != 1:
        raise DomainError("evaluation points must be a scalar or 1-d array")
    if not np.all(np.isfinite(xs)):
        raise DomainError("evaluation points must be finite")
    return xs


def eval_window(spec: RecurrenceSpec, k: int, x) -> PolyWindow:
    """Run the recurrence from ``p_{-1}=0, p_0=1`` up to ``p_{k+2}``."""
    if k < 0:
        raise DomainError("window center must be >= 0")
    xs = _as_points(x)
    a, b, c = spec.coefficients(k + 2)
    n = xs.size
    prev = np.zeros(n)
    cur = np.ones(n)
    e = np.zeros(n, dtype=np.int64)  # shared exponent of (prev, cur)
    store_m = np.zeros((5, n))
    store_e = np.zeros((5, n), dtype=np.int64)

    def keep(j, m):
        off = j - k + 2
        if 0 <= off < 5:
            store_m[off] = m
            store_e[off] = e

    keep(0, cur)
    for j in range(1, k + 3):
        nxt = (c[j] / a[j]) * ((xs - b[j - 1]) * cur - (a[j - 1] * c[j - 1]) * prev)
        prev, cur = cur, nxt
        big = np.maximum(np.abs(prev), np.abs(cur))
        _, ex = np.frexp(big)
        shift = np.where((big > 0) & (np.abs(ex) > RESCALE_BITS), ex, 0).astype(np.int64)
        if np.any(shift):
            prev = np.ldexp(prev, -shift)
            cur = np.ldexp(cur, -shift)
            e = e + shift
            # earlier stored entry j-1 keeps its own exponent; nothing to patch
        if not np.all(np.isfinite(cur)):
            raise DomainError(f"non-finite polynomial value at degree {j}; coefficients overflow doubles")
        keep(j, cur)
    values = ScaledArray(store_m, store_e)
    return PolyWindow(k=k, x=xs, values=values, a=a, b=b, c=c)


def eval_window_extended(spec: RecurrenceSpec, k: int, x) -> PolyWindow:
    """Same window in double-double arithmetic (values are :class:`DDArray`).

    The coefficients are taken as exact doubles, so the window satisfies the
    recurrence of those doubles to about ``1e-30`` relative.
    """
    if k < 0:
        raise DomainError("window center must be >= 0")
    xs = _as_points(x)
    a, b, c = spec.coefficients(k + 2)
    X = DDArray(xs)
    prev = DDArray(np.zeros(xs.size))
    cur = DDArray(np.ones(xs.size))
    kept: dict[int, DDArray] = {0: cur}
    for j in range(1, k + 3):
        ratio = DDArray(c[j]) / a[j]
        lag = DDArray(a[j - 1]) * c[j - 1]
        nxt = ratio * ((X - b[j - 1]) * cur - lag * prev)
        prev, cur = cur, nxt
        kept[j] = cur
    zero = DDArray(np.zeros(xs.size))
    rows = [kept.get(j, zero) for j in range(k - 2, k + 3)]
    values = DDArray(
        np.stack([r.hi for r in rows]),
        np.stack([r.lo for r in rows]),
        np.stack([r.e for r in rows]),
        normalized=True,
    )
    return PolyWindow(k=k, x=xs, values=values, a=a, b=b, c=c)


def poly_coeffs_exact(spec: RecurrenceSpec, k: int) -> np.ndarray:
    """Monomial coefficients of ``p_k``, highest degree first (test oracle, k <= 30)."""
    if k < 0 or k > EXACT_MAX_DEGREE:
        raise DomainError(f"poly_coeffs_exact supports 0 <= k <= {EXACT_MAX_DEGREE}")
    a, b, c = spec.coefficients(max(k, 1))
    # lowest-first internally; coefficient i of p_j
    polys = [[1.0]]
    prev: list[float] = [0.0]
    for j in range(1, k + 1):
        cur = polys[-1]
        f = c[j] / a[j]
        g = a[j - 1] * c[j - 1]
        new = []
        for i in range(j + 1):
            terms = []
            if i >= 1 and i - 1 < len(cur):
                terms.append(f * cur[i - 1])
            if i < len(cur):
                terms.append(-f * b[j - 1] * cur[i])
            if i < len(prev):
                terms.append(-f * g * prev[i])
            new.append(math.fsum(terms))
        prev = cur
        polys.append(new)
    return np.array(polys[k][::-1])


# ---------------------------------------------------------------- operators

class TuranOp(str, Enum):
    T2 = "T2"
    T4 = "T4"
    S2 = "S2"
    S4 = "S4"
    XI = "xi"
    S4_GENERAL = "S4-general"


_NEEDS_K2 = {TuranOp.T4, TuranOp.S4, TuranOp.S4_GENERAL}


@dataclass(frozen=True)
class TuranValue:
    op: str
    k: int
    x: float
    value: ScaledReal
    sign: int
    scale: ScaledReal
    coefficients: dict

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "k": self.k,
            "x": self.x,
            "value": self.value.to_dict(),
            "sign": self.sign,
            "coefficients": self.coefficients,
        }


@dataclass(frozen=True)
class TuranGrid:
    op: str
    k: int
    x: np.ndarray
    values: ScaledArray
    sign: np.ndarray
    scale: ScaledArray
    coefficients: dict

    def __len__(self):
        return self.x.size

    def as_float(self) -> np.ndarray:
        return self.values.to_float()

    def at(self, i: int) -> TuranValue:
        return TuranValue(
            op=self.op,
            k=self.k,
            x=float(self.x[i]),
            value=self.values[i].item(),
            sign=int(self.sign[i]),
            scale=self.scale[i].item(),
            coefficients=self.coefficients,
        )


def s4_symmetric_coeffs(a, c, k: int) -> tuple[float, float]:
    a2 = lambda i: a[i] * a[i]
    den = a2(k + 1) - a2(k - 2)
    if den == 0.0:
        raise SingularityError(f"S4 undefined at k={k}: a_{k + 1}^2 = a_{k - 2}^2")
    mu = (c[k] / c[k + 1]) * a[k + 1] * (a2(k + 1) + a2(k) - a2(k - 1) - a2(k - 2)) / (a[k] * den)
    nu = (
        (c[k] * c[k - 1] / (c[k + 2] * c[k + 1]))
        * a[k + 2] * a[k + 1] * (a2(k) - a2(k - 1))
        / (a[k] * a[k - 1] * den)
    )
    return mu, nu


def s4_general_coeffs(spec: RecurrenceSpec, k: int) -> tuple[float, float]:
    """``(mu_k, nu_k)`` giving the lowest-degree fourth-order operator.

    Symmetric specs use the ``a``-based forms (the ``b``-based ones are 0/0).
    """
    if k < 2:
        raise DomainError("S4 needs k >= 2")
    a, b, c = spec.coefficients(k + 2)
    if np.all(b[: k + 3] == 0.0):
        return s4_symmetric_coeffs(a, c, k)
    den = b[k + 1] - b[k - 2]
    if den == 0.0:
        raise SingularityError(f"S4 coefficients undefined at k={k}: b_{k + 1} - b_{k - 2} = 0")
    mu = a[k + 1] * c[k] * (b[k + 1] + b[k] - b[k - 1] - b[k - 2]) / (a[k] * c[k + 1] * den)
    nu = (
        a[k + 2] * a[k + 1] * c[k] * c[k - 1] * (b[k] - b[k - 1])
        / (a[k] * a[k - 1] * c[k + 2] * c[k + 1] * den)
    )
    return mu, nu


def s2_coefficient(a, c, k: int) -> float:
    return (c[k] / c[k + 1]) * (a[k + 1] / a[k])


def _terms(w: PolyWindow, op: TuranOp, spec: RecurrenceSpec, xi: float | None):
    k = w.k
    pk, pm, pp = w.p(k), w.p(k - 1), w.p(k + 1)
    a, c = w.a, w.c
    if op is TuranOp.T2:
        return [pk * pk, -(pm * pp)], {}
    if op is TuranOp.T4:
        return [3.0 * (pk * pk), -4.0 * (pm * pp), w.p(k - 2) * w.p(k + 2)], {}
    if op is TuranOp.S2:
        s = s2_coefficient(a, c, k)
        return [pk * pk, -s * (pm * pp)], {"xi": s}
    if op is TuranOp.XI:
        if xi is None or xi < 0:
            raise DomainError("xi-weighted operator needs xi >= 0")
        s = xi * a[k + 1] * c[k] / (a[k] * c[k + 1])
        return [pk * pk, -s * (pm * pp)], {"xi": xi, "weight": s}
    mu, nu = s4_general_coeffs(spec, k)
    return [pk * pk, -mu * (pm * pp), nu * (w.p(k - 2) * w.p(k + 2))], {"mu": mu, "nu": nu}


def turan_grid(spec: RecurrenceSpec, op, k: int, x, xi: float | None = None) -> TuranGrid:
    """Operator values on a grid; sign is 0 inside the cancellation band."""
    op = TuranOp(op)
    min_k = 2 if op in _NEEDS_K2 else 1
    if k < min_k:
        raise DomainError(f"{op.value} needs k >= {min_k}")
    w = eval_window(spec, k, x)
    terms, coefs = _terms(w, op, spec, xi)
    value = scaled_sum(terms)
    scale = scaled_max_abs(terms)
    with np.errstate(divide="ignore"):
        small = value.log2abs() < scale.log2abs() + math.log2(SIGN_BAND)
    sign = np.where(small | (value.m == 0.0), 0, value.sign())
    return TuranGrid(op=op.value, k=k, x=w.x, values=value, sign=sign, scale=scale, coefficients=coefs)


def turan(spec: RecurrenceSpec, op, k: int, x: float, xi: float | None = None) -> TuranValue:
    return turan_grid(spec, op, k, float(x), xi=xi).at(0)


def turan_xi(spec: RecurrenceSpec, k: int, x, xi: float):
    """``p_k^2 - xi (a_{k+1} c_k)/(a_k c_{k+1}) p_{k-1} p_{k+1}``."""
    if np.ndim(x) == 0:
        return turan(spec, TuranOp.XI, k, x, xi=xi)
    return turan_grid(spec, TuranOp.XI, k, x, xi=xi)


@dataclass(frozen=True)
class XiChoice:
    xi: float
    side: str
    region_bound: float  # upper tail: valid for x > bound; lower tail: x < bound
    unit_allowed: bool  # xi = 1 admissible for x beyond unit_bound
    unit_bound: float

    def valid_at(self, x: float) -> bool:
        return x > self.region_bound if self.side == "upper-tail" else x < self.region_bound

    def to_dict(self) -> dict:
        return {
            "xi": self.xi,
            "side": self.side,
            "region_bound": self.region_bound,
            "unit_allowed": self.unit_allowed,
            "unit_bound": self.unit_bound,
        }


def xi_optimal(spec: RecurrenceSpec, k: int, x1k: float, xkk: float, side: str = "upper-tail") -> XiChoice:
    """Weight keeping ``q_k^2 - xi q_{k-1} q_{k+1}`` positive beyond the extreme zero."""
    if not x1k <= xkk:
        raise DomainError("need x1k <= xkk")
    a, b, _ = spec.coefficients(k)
    ak, bk = a[k], b[k]
    if side == "upper-tail":
        h = xkk - bk
        root = math.sqrt(4 * ak * ak + h * h)
        return XiChoice(float(4 * ak * ak / (4 * ak * ak + h * h)), side, float(bk - root), bool(xkk >= bk), float(bk - 2 * ak))
    if side == "lower-tail":
        h = x1k - bk
        root = math.sqrt(4 * ak * ak + h * h)
        return XiChoice(float(4 * ak * ak / (4 * ak * ak + h * h)), side, float(bk + root), bool(x1k <= bk), float(bk + 2 * ak))
    raise DomainError(f"unknown side {side!r}; use upper-tail or lower-tail")


# ---------------------------------------------------------------- K-quadratics

@dataclass(frozen=True)
class KPolys:
    """``K2, K1, K0`` as polynomials in x, highest degree first."""

    k: int
    K2: np.ndarray
    K1: np.ndarray
    K0: np.ndarray

    def G(self) -> np.ndarray:
        return _poly_sub(4.0 * _conv(self.K0, self.K2), _conv(self.K1, self.K1))


def _conv(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = []
    n = len(p) + len(q) - 1
    for d in range(n):
        out.append(math.fsum(p[i] * q[d - i] for i in range(len(p)) if 0 <= d - i < len(q)))
    return np.array(out)


def _poly_sub(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    n = max(len(p), len(q))
    p = np.concatenate([np.zeros(n - len(p)), p])
    q = np.concatenate([np.zeros(n - len(q)), q])
    return np.array([math.fsum((u, -v)) for u, v in zip(p, q)])


def kform_coefficients(a, b, k: int) -> KPolys:
    """Coefficients of the quadratic ``K2 t^2 + K1 t + K0`` in ``t = p_k/p_{k+1}``.

    Uses ``a_{k-1} .. a_{k+2}`` and ``b_{k-1} .. b_{k+1}``; the form equals
    ``a_{k-1} a_k a_{k+2} T4(p_k) / p_{k+1}^2`` for orthonormal ``p``.
    """
    if k < 1:
        raise DomainError("K-quadratics need k >= 1")
    am, a0, a1, a2 = (float(a[k + d]) for d in (-1, 0, 1, 2))
    bm, b0, b1 = (float(b[k + d]) for d in (-1, 0, 1))
    s = math.fsum
    K2 = np.array([-a1, a1 * (b0 + bm), s([a0 * a0 * a1, 3 * am * a0 * a2, -a1 * bm * b0])])
    K1 = np.array([
        1.0,
        -s([bm, b0, b1]),
        s([a1 * a1, -a0 * a0, -4 * am * a2, bm * b0, bm * b1, b0 * b1]),
        s([4 * am * a2 * b0, -a1 * a1 * bm, a0 * a0 * b1, -bm * b0 * b1]),
    ])
    K0 = np.array([-a1, a1 * (b1 + bm), -a1 * s([bm * b1, -4 * am * a2])])
    return KPolys(k=k, K2=K2, K1=K1, K0=K0)


@dataclass(frozen=True)
class QuadraticForms:
    k: int
    x: np.ndarray
    K2: np.ndarray
    K1: np.ndarray
    K0: np.ndarray
    f: np.ndarray  # nan where K2 == 0
    f_defined: np.ndarray

    def value(self, t) -> np.ndarray:
        return self.K2 * t * t + self.K1 * t + self.K0


def quadratic_forms(spec: RecurrenceSpec, k: int, x) -> QuadraticForms:
    xs = _as_points(x)
    a, b, _ = spec.coefficients(k + 2)
    kp = kform_coefficients(a, b, k)
    K2 = np.polyval(kp.K2, xs)
    K1 = np.polyval(kp.K1, xs)
    K0 = np.polyval(kp.K0, xs)
    ok = K2 != 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(ok, -K1 / (2 * np.where(ok, K2, 1.0)), np.nan)
    return QuadraticForms(k=k, x=xs, K2=K2, K1=K1, K0=K0, f=f, f_defined=ok)


def kform_residual(spec: RecurrenceSpec, k: int, x) -> np.ndarray:
    """Relative gap between the K-form at ``t_k`` and ``a_{k-1} a_k a_{k+2} T4 / p_{k+1}^2``."""
    if k < 2:
        raise DomainError("K-form identity needs k >= 2")
    ortho = spec.with_normalization(ORTHONORMAL)
    qf = quadratic_forms(ortho, k, x)
    w = eval_window(ortho, k, qf.x)
    a = w.a
    t = w.t()
    lhs = qf.value(t)
    grid = turan_grid(ortho, TuranOp.T4, k, qf.x)
    p1 = w.p(k + 1)
    rhs = ((a[k - 1] * a[k] * a[k + 2]) * grid.values / (p1 * p1)).to_float()
    scale = np.maximum.reduce([np.abs(qf.K2 * t * t), np.abs(qf.K1 * t), np.abs(qf.K0), np.abs(rhs)])
    return np.abs(lhs - rhs) / np.maximum(scale, np.finfo(float).tiny)
