"""Wide-exponent floating point.

Polynomial values along a three-term recurrence routinely leave the double
range (q-families grow like ``q**(-k*k)``).  Values are kept as a double
mantissa in ``[1, 2)`` times ``2**exponent`` with an unbounded integer
exponent.  :class:`ScaledArray` is the vectorised workhorse; :class:`ScaledReal`
is the immutable scalar view handed out by the public API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# ldexp arguments below this are flushed to zero anyway
_MIN_SHIFT = -1100


def _normalize(m: np.ndarray, e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    fr, ex = np.frexp(m)
    m = fr * 2.0
    e = e + ex.astype(np.int64) - 1
    e = np.where(m == 0.0, 0, e)
    return m, e


class ScaledArray:
    """Array of numbers ``m * 2**e`` with ``|m|`` in ``[1, 2)`` or ``m == 0``.

    The sign lives in the mantissa.  Arithmetic broadcasts like numpy.
    """

    __slots__ = ("m", "e")
    # make numpy operands defer to the reflected operators below
    __array_ufunc__ = None

    def __init__(self, m, e=0, *, normalized: bool = False):
        m = np.asarray(m, dtype=float)
        e = np.asarray(e, dtype=np.int64)
        m, e = np.broadcast_arrays(m, e)
        if not normalized:
            m, e = _normalize(m, e)
        self.m = np.array(m, dtype=float)
        self.e = np.array(e, dtype=np.int64)

    @classmethod
    def coerce(cls, v) -> "ScaledArray":
        if isinstance(v, ScaledArray):
            return v
        if isinstance(v, ScaledReal):
            return v.as_array()
        return cls(v)

    @property
    def shape(self):
        return self.m.shape

    def __len__(self):
        return len(self.m)

    def __getitem__(self, idx) -> "ScaledArray":
        return ScaledArray(self.m[idx], self.e[idx], normalized=True)

    def __mul__(self, other) -> "ScaledArray":
        o = ScaledArray.coerce(other)
        return ScaledArray(self.m * o.m, self.e + o.e)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScaledArray":
        o = ScaledArray.coerce(other)
        with np.errstate(divide="ignore", invalid="ignore"):
            return ScaledArray(self.m / o.m, self.e - o.e)

    def __neg__(self) -> "ScaledArray":
        return ScaledArray(-self.m, self.e, normalized=True)

    def __abs__(self) -> "ScaledArray":
        return ScaledArray(np.abs(self.m), self.e, normalized=True)

    def __add__(self, other) -> "ScaledArray":
        o = ScaledArray.coerce(other)
        m1, e1, m2, e2 = np.broadcast_arrays(self.m, self.e, o.m, o.e)
        top = np.where(m1 == 0.0, e2, np.where(m2 == 0.0, e1, np.maximum(e1, e2)))
        s1 = np.clip(e1 - top, _MIN_SHIFT, 0)
        s2 = np.clip(e2 - top, _MIN_SHIFT, 0)
        return ScaledArray(np.ldexp(m1, s1) + np.ldexp(m2, s2), top)

    __radd__ = __add__

    def __sub__(self, other) -> "ScaledArray":
        return self + (-ScaledArray.coerce(other))

    def __rsub__(self, other) -> "ScaledArray":
        return ScaledArray.coerce(other) + (-self)

    def sign(self) -> np.ndarray:
        return np.sign(self.m).astype(int)

    def log2abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log2(np.abs(self.m)) + self.e

    def to_float(self) -> np.ndarray:
        # beyond +-2**1100 the result is inf / 0 regardless
        e = np.clip(self.e, -2200, 2200)
        with np.errstate(over="ignore"):
            return np.ldexp(self.m, e)

    def item(self) -> "ScaledReal":
        if self.m.size != 1:
            raise ValueError("item() needs a single element")
        m = float(self.m.reshape(-1)[0])
        e = int(self.e.reshape(-1)[0])
        return ScaledReal(int(math.copysign(1, m)) if m else 0, abs(m), e)

    def __repr__(self):
        return f"ScaledArray(m={self.m!r}, e={self.e!r})"


def scaled_sum(terms) -> ScaledArray:
    terms = list(terms)
    total = ScaledArray.coerce(terms[0])
    for t in terms[1:]:
        total = total + t
    return total


def scaled_max_abs(terms) -> ScaledArray:
    """Elementwise largest magnitude among ``terms``."""
    best = abs(ScaledArray.coerce(terms[0]))
    for t in terms[1:]:
        t = abs(ScaledArray.coerce(t))
        take = t.log2abs() > best.log2abs()
        best = ScaledArray(np.where(take, t.m, best.m), np.where(take, t.e, best.e), normalized=True)
    return best


@dataclass(frozen=True)
class ScaledReal:
    """Scalar ``sign * mantissa * 2**exponent``."""

    sign: int
    mantissa: float
    exponent: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if (self.sign == 0) != (self.mantissa == 0.0):
            raise ValueError("sign is 0 exactly when the mantissa is 0")
        if self.mantissa != 0.0 and not 1.0 <= self.mantissa < 2.0:
            raise ValueError(f"mantissa {self.mantissa} outside [1, 2)")

    @classmethod
    def from_float(cls, v: float, exponent: int = 0) -> "ScaledReal":
        return ScaledArray(v, exponent).item()

    @classmethod
    def zero(cls) -> "ScaledReal":
        return cls(0, 0.0, 0)

    def as_array(self) -> ScaledArray:
        return ScaledArray(self.sign * self.mantissa, self.exponent, normalized=True)

    def __mul__(self, other) -> "ScaledReal":
        return (self.as_array() * other).item()

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScaledReal":
        return (self.as_array() / other).item()

    def __add__(self, other) -> "ScaledReal":
        return (self.as_array() + other).item()

    __radd__ = __add__

    def __sub__(self, other) -> "ScaledReal":
        return (self.as_array() - other).item()

    def __neg__(self) -> "ScaledReal":
        return ScaledReal(-self.sign, self.mantissa, self.exponent)

    def __abs__(self) -> "ScaledReal":
        return ScaledReal(abs(self.sign), self.mantissa, self.exponent)

    def __float__(self) -> float:
        return float(self.as_array().to_float())

    def log2abs(self) -> float:
        if self.sign == 0:
            return -math.inf
        return math.log2(self.mantissa) + self.exponent

    def to_dict(self) -> dict:
        return {"sign": self.sign, "mantissa": self.mantissa, "exponent2": self.exponent}
