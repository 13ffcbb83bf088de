"""Numerical residuals of the algebraic identities behind the positivity results.

Each identity is evaluated as two independently computed sides (fresh
polynomial windows per side, and per term for the sums of squares) so the
residual ``|lhs - rhs| / max(|lhs|, |rhs|)`` is a genuine check of both the
algebra and the evaluation kernel.

The default ``precision="extended"`` runs windows and all coefficient
arithmetic in double-double.  Several identities equate a difference of two
large terms with a small one (near zeros of ``p_k`` the right side of the
S2 step identity vanishes), so in plain doubles the relative residual there is
limited by cancellation, not by the identity.  ``precision="double"`` keeps
the plain kernel for comparison.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .ddarith import DDArray
from .errors import DomainError, WrongHypothesisError
from .evalkernel import eval_window, eval_window_extended
from .recurrence import MONIC, ORTHONORMAL, RecurrenceSpec
from .scaled import ScaledArray

# both sides below this fraction of the largest summand count as zero
ZERO_FLOOR = 1e-20


class IdentityId(str, Enum):
    I17 = "I17"
    I25 = "I25"
    I29 = "I29"
    I30 = "I30"
    I32 = "I32"
    SOS_T2 = "SOS-T2"
    SOS_S2 = "SOS-S2"


# minimal k and whether b must vanish
_REQUIREMENTS = {
    IdentityId.I17: (0, False),
    IdentityId.I25: (2, True),
    IdentityId.I29: (1, True),
    IdentityId.I30: (2, True),
    IdentityId.I32: (2, True),
    IdentityId.SOS_T2: (1, True),
    IdentityId.SOS_S2: (1, True),
}

_NORMALIZATION = {
    IdentityId.I25: MONIC,
    IdentityId.SOS_T2: MONIC,
    IdentityId.I29: ORTHONORMAL,
    IdentityId.I30: ORTHONORMAL,
    IdentityId.I32: ORTHONORMAL,
    IdentityId.SOS_S2: ORTHONORMAL,
}


class _Ctx:
    """Window factory plus coefficient lifting for one arithmetic."""

    def __init__(self, spec: RecurrenceSpec, k: int, x: np.ndarray, extended: bool):
        self.spec = spec
        self.x = x
        self.num = DDArray if extended else ScaledArray
        self._window = eval_window_extended if extended else eval_window
        self.a, self.b, self.c = spec.coefficients(k + 3)
        self._lifted: dict[float, object] = {}
        self._squares: dict[int, object] = {}

    def window(self, j):
        return self._window(self.spec, j, self.x)

    def p(self, j):
        """Fresh evaluation of ``p_j`` alone."""
        return self.window(j).p(j)

    def A(self, i):
        """``a_i^2``, zero for negative ``i``."""
        if i < 0:
            return self.lift(0.0)
        if i not in self._squares:
            ai = self.lift(self.a[i])
            self._squares[i] = ai * ai
        return self._squares[i]

    def lift(self, v):
        v = float(v)
        if v not in self._lifted:
            self._lifted[v] = self.num(v)
        return self._lifted[v]

    def t2(self, w, k):
        return w.p(k) * w.p(k) - w.p(k - 1) * w.p(k + 1)

    def t4(self, w, k):
        return 3.0 * (w.p(k) * w.p(k)) - 4.0 * (w.p(k - 1) * w.p(k + 1)) + w.p(k - 2) * w.p(k + 2)

    def s2(self, w, k):
        L, a, c = self.lift, self.a, self.c
        xi = (L(c[k]) / L(c[k + 1])) * (L(a[k + 1]) / L(a[k]))
        return w.p(k) * w.p(k) - xi * (w.p(k - 1) * w.p(k + 1))

    def s4(self, w, k):
        L, a, c, A = self.lift, self.a, self.c, self.A
        den = A(k + 1) - A(k - 2)
        mu = (L(c[k]) / L(c[k + 1])) * L(a[k + 1]) * (A(k + 1) + A(k) - A(k - 1) - A(k - 2)) / (L(a[k]) * den)
        nu = (
            (L(c[k]) * L(c[k - 1]) / (L(c[k + 2]) * L(c[k + 1])))
            * L(a[k + 2]) * L(a[k + 1]) * (A(k) - A(k - 1))
            / (L(a[k]) * L(a[k - 1]) * den)
        )
        return w.p(k) * w.p(k) - mu * (w.p(k - 1) * w.p(k + 1)) + nu * (w.p(k - 2) * w.p(k + 2))

    def R(self, i):
        A = self.A
        return (
            A(i + 1) * A(i) * (A(i - 1) - A(i - 2))
            - A(i) * A(i - 2) * (A(i) - A(i - 2))
            + A(i - 2) * A(i - 3) * (A(i) - A(i - 1))
        )


def _sum(terms):
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


def _sides(ident: IdentityId, cx: _Ctx, k: int):
    L, A = cx.lift, cx.A
    a, b, c = cx.a, cx.b, cx.c

    if ident is IdentityId.I17:
        w1, w0 = cx.window(k + 1), cx.window(k)
        D = L(a[k + 2]) * L(c[k + 1]) - L(a[k + 1]) * L(c[k + 2])
        db = L(b[k + 1]) - L(b[k])
        cc = L(c[k + 1]) * L(c[k + 2])
        inner = L(a[k + 2]) * cx.t2(w1, k + 1) - (L(a[k]) * L(c[k]) * L(c[k + 2])) * cx.t2(w0, k)
        lhs = 4.0 * L(c[k + 1]) * D * inner
        sq = 2.0 * D * w1.p(k + 1) + db * cc * w1.p(k)
        coef = cc * (4.0 * D * (L(a[k + 1]) * L(c[k + 1]) - L(a[k]) * L(c[k])) - db * db * cc)
        square, rest = sq * sq, coef * (w1.p(k) * w1.p(k))
        return lhs, square + rest, [lhs, square, rest]

    if ident is IdentityId.I25:
        w1, w0 = cx.window(k + 1), cx.window(k)
        terms = [
            A(k - 1) * cx.t4(w0, k),
            (A(k + 2) + 3.0 * A(k) - 4.0 * A(k - 1)) * cx.t2(w0, k),
            (A(k - 1) - 3.0 * A(k) + 3.0 * A(k + 1) - A(k + 2)) * (w0.p(k) * w0.p(k)),
        ]
        lhs = cx.t4(w1, k + 1)
        return lhs, _sum(terms), [lhs] + terms

    if ident is IdentityId.I29:
        w1, w0 = cx.window(k + 1), cx.window(k)
        up, down = A(k + 1) * cx.s2(w1, k + 1), A(k) * cx.s2(w0, k)
        pk = cx.p(k)
        rhs = (A(k + 1) - A(k)) * (pk * pk)
        return up - down, rhs, [up, down, rhs]

    if ident is IdentityId.I30:
        w1, w0 = cx.window(k + 1), cx.window(k)
        lhs = (A(k + 1) * (A(k + 2) - A(k - 1)) * (A(k) - A(k - 1))) * cx.s4(w1, k + 1)
        first = (A(k - 1) * (A(k + 1) - A(k - 2)) * (A(k + 1) - A(k))) * cx.s4(w0, k)
        second = cx.R(k + 1) * cx.s2(w0, k)
        return lhs, first + second, [lhs, first, second]

    if ident is IdentityId.I32:

        def cal(i):
            return A(i) * A(i) - A(i - 1) * A(i - 1) + A(i) * A(i + 1) - A(i - 1) * A(i - 2)

        den = A(k) * A(k - 1) * (A(k + 1) - A(k - 2))
        terms = []
        for i in range(0, k - 1):
            pi = cx.p(i)
            weight = ((A(i + 1) - A(i)) * cal(k) - (A(k) - A(k - 1)) * cal(i + 1)) / den
            terms.append(weight * (pi * pi))
        lhs = cx.s4(cx.window(k), k)
        return lhs, _sum(terms), [lhs] + terms

    if ident is IdentityId.SOS_T2:
        terms = []
        for i in range(k):
            pi = cx.p(i)
            weight = A(i + 1) - A(i)
            for j in range(i + 1, k):
                weight = weight * A(j)
            terms.append(weight * (pi * pi))
        lhs = cx.t2(cx.window(k), k)
        return lhs, _sum(terms), [lhs] + terms

    if ident is IdentityId.SOS_S2:
        terms = []
        for i in range(k):
            pi = cx.p(i)
            terms.append(((A(i + 1) - A(i)) / A(k)) * (pi * pi))
        lhs = cx.s2(cx.window(k), k)
        return lhs, _sum(terms), [lhs] + terms

    raise DomainError(f"unknown identity {ident!r}")


def identity_sides(ident, spec: RecurrenceSpec, k: int, x, precision: str = "extended"):
    """Both sides of the identity, after switching to the normalization it is stated in.

    ``I17`` holds for any normalization and uses the spec's own ``c``.
    """
    lhs, rhs, _ = _evaluate(ident, spec, k, x, precision)
    return lhs, rhs


def _evaluate(ident, spec, k, x, precision):
    ident = IdentityId(ident)
    if precision not in ("extended", "double"):
        raise DomainError(f"precision must be 'extended' or 'double', got {precision!r}")
    min_k, needs_sym = _REQUIREMENTS[ident]
    if k < min_k:
        raise DomainError(f"{ident.value} needs k >= {min_k}")
    if needs_sym and not spec.is_symmetric(k + 3):
        raise WrongHypothesisError(f"{ident.value} holds for symmetric recurrences only (b != 0 found)")
    if ident in _NORMALIZATION:
        spec = spec.with_normalization(_NORMALIZATION[ident])
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    return _sides(ident, _Ctx(spec, k, xs, precision == "extended"), k)


def verify_identity(ident, spec: RecurrenceSpec, k: int, x, precision: str = "extended"):
    """``|lhs - rhs| / max(|lhs|, |rhs|, floor)``; scalar in, scalar out.

    ``floor`` is ``ZERO_FLOOR`` times the largest summand on either side, so
    an identity whose sides both vanish (``I17`` when ``a_{k+2} c_{k+1} =
    a_{k+1} c_{k+2}``, as in the monic normalization, or ``I29`` at a common
    zero) is not judged by rounding noise.
    """
    lhs, rhs, terms = _evaluate(ident, spec, k, x, precision)
    diff = abs(lhs - rhs)
    floor = np.maximum.reduce([abs(t).log2abs() for t in terms]) + np.log2(ZERO_FLOOR)
    big = np.maximum.reduce([abs(lhs).log2abs(), abs(rhs).log2abs(), floor])
    d = diff.log2abs()
    with np.errstate(invalid="ignore"):
        res = np.where(np.isfinite(d) & np.isfinite(big), np.exp2(np.clip(d - big, -1100, 60)), 0.0)
    return float(res[0]) if np.ndim(x) == 0 else res
