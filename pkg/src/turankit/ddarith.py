"""Double-double numbers with a wide binary exponent.

Used where an identity's two sides cancel to far below the size of their
terms (for instance near a zero of ``p_k``); plain doubles would leave a
relative residual of order ``eps * terms / result`` there.  Values are
``(hi + lo) * 2**e`` with ``|hi|`` in ``[1, 2)`` and ``|lo| <= ulp(hi) / 2``.
"""

from __future__ import annotations

import numpy as np

from .scaled import ScaledArray

_SPLIT = 134217729.0  # 2**27 + 1
_MIN_SHIFT = -1100


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLIT * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _normalize(hi, lo, e):
    hi, lo = _two_sum(hi, lo)
    _, ex = np.frexp(hi)
    nz = hi != 0.0
    shift = np.where(nz, ex - 1, 0).astype(np.int64)
    hi = np.ldexp(hi, -shift)
    lo = np.where(nz, np.ldexp(lo, -shift), 0.0)
    e = np.where(nz, e + shift, 0)
    return hi, lo, e


class DDArray:
    __slots__ = ("hi", "lo", "e")
    __array_ufunc__ = None

    def __init__(self, hi, lo=0.0, e=0, *, normalized: bool = False):
        hi = np.asarray(hi, dtype=float)
        lo = np.asarray(lo, dtype=float)
        e = np.asarray(e, dtype=np.int64)
        if not (hi.shape == lo.shape == e.shape):
            hi, lo, e = (np.array(v) for v in np.broadcast_arrays(hi, lo, e))
        if not normalized:
            hi, lo, e = _normalize(hi, lo, e)
        self.hi, self.lo, self.e = hi, lo, e

    @classmethod
    def _raw(cls, hi, lo, e) -> "DDArray":
        out = object.__new__(cls)
        out.hi, out.lo, out.e = hi, lo, e
        return out

    @classmethod
    def coerce(cls, v) -> "DDArray":
        if isinstance(v, DDArray):
            return v
        if isinstance(v, ScaledArray):
            return cls(v.m, 0.0, v.e)
        return cls(v)

    def __getitem__(self, idx) -> "DDArray":
        return DDArray(self.hi[idx], self.lo[idx], self.e[idx], normalized=True)

    def __neg__(self) -> "DDArray":
        return DDArray._raw(-self.hi, -self.lo, self.e)

    def __abs__(self) -> "DDArray":
        s = np.where(self.hi < 0, -1.0, 1.0)
        return DDArray(s * self.hi, s * self.lo, self.e, normalized=True)

    def __add__(self, other) -> "DDArray":
        o = DDArray.coerce(other)
        h1, l1, e1, h2, l2, e2 = self.hi, self.lo, self.e, o.hi, o.lo, o.e
        if h1.shape != h2.shape:
            h1, l1, e1, h2, l2, e2 = np.broadcast_arrays(h1, l1, e1, h2, l2, e2)
        top = np.where(h1 == 0.0, e2, np.where(h2 == 0.0, e1, np.maximum(e1, e2)))
        s1 = np.maximum(e1 - top, _MIN_SHIFT)
        s2 = np.maximum(e2 - top, _MIN_SHIFT)
        h1, l1 = np.ldexp(h1, s1), np.ldexp(l1, s1)
        h2, l2 = np.ldexp(h2, s2), np.ldexp(l2, s2)
        s, err = _two_sum(h1, h2)
        t, terr = _two_sum(l1, l2)
        err = err + t
        s, err = _quick_two_sum(s, err)
        err = err + terr
        s, err = _quick_two_sum(s, err)
        return DDArray._raw(*_normalize(s, err, top))

    __radd__ = __add__

    def __sub__(self, other) -> "DDArray":
        return self + (-DDArray.coerce(other))

    def __rsub__(self, other) -> "DDArray":
        return DDArray.coerce(other) + (-self)

    def __mul__(self, other) -> "DDArray":
        o = DDArray.coerce(other)
        p, err = _two_prod(self.hi, o.hi)
        err = err + (self.hi * o.lo + self.lo * o.hi)
        p, err = _quick_two_sum(p, err)
        return DDArray._raw(*_normalize(p, err, self.e + o.e))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DDArray":
        o = DDArray.coerce(other)
        with np.errstate(divide="ignore", invalid="ignore"):
            q1 = self.hi / o.hi
            r = DDArray(self.hi, self.lo, 0, normalized=True) - DDArray(o.hi, o.lo, 0, normalized=True) * q1
            q2 = r.to_float() / o.hi
            r = r - DDArray(o.hi, o.lo, 0, normalized=True) * q2
            q3 = r.to_float() / o.hi
        q = DDArray(q1) + DDArray(q2) + DDArray(q3)
        return DDArray(q.hi, q.lo, q.e + self.e - o.e)

    def __rtruediv__(self, other) -> "DDArray":
        return DDArray.coerce(other) / self

    def sign(self) -> np.ndarray:
        return np.sign(self.hi).astype(int)

    def log2abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log2(np.abs(self.hi + self.lo)) + self.e

    def to_float(self) -> np.ndarray:
        e = np.clip(self.e, -2200, 2200)
        with np.errstate(over="ignore"):
            return np.ldexp(self.hi, e) + np.ldexp(self.lo, e)

    def to_scaled(self) -> ScaledArray:
        return ScaledArray(self.hi + self.lo, self.e)
