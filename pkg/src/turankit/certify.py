"""Index-by-index checks of sufficient conditions for Turan-type positivity.

Each ``certify_*`` function returns a :class:`CertReport` whose rows record the
signed slack ("margin") of one inequality at one index.  A row passes when its
margin is at least ``-tolerance``; strict rows (strict monotonicity, strict
ratio conditions) need a positive margin.  The tolerance is ``1e-12`` times the
magnitude of the largest term entering the inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, WrongHypothesisError
from .recurrence import (
    Normalization,
    NormKind,
    RecurrenceSpec,
    TestSequenceParams,
    test_sequences,
)
from .report import dumps, jsonable

REL_TOL = 1e-12
LEMMA7_RANGE = 10_000


@dataclass(frozen=True)
class CertRow:
    i: int
    condition: str
    margin: float
    tolerance: float
    strict: bool = False
    gating: bool = True  # informational rows do not affect the verdict
    quantities: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if math.isnan(self.margin):
            return False
        if self.strict:
            return self.margin > 0
        return self.margin >= -self.tolerance

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "condition": self.condition,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "strict": self.strict,
            "gating": self.gating,
            "passed": self.passed,
            "quantities": self.quantities,
        }


@dataclass(frozen=True)
class CertReport:
    theorem: str
    normalization: str
    k: int
    rows: tuple[CertRow, ...]
    notes: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows if r.gating)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def first_failure(self) -> CertRow | None:
        return next((r for r in self.rows if r.gating and not r.passed), None)

    def rows_for(self, condition: str) -> list[CertRow]:
        return [r for r in self.rows if r.condition == condition]

    def min_margin(self, condition: str) -> float:
        return min(r.margin for r in self.rows_for(condition))

    def to_dict(self) -> dict:
        fail = self.first_failure
        return {
            "theorem": self.theorem,
            "verdict": self.verdict,
            "normalization": self.normalization,
            "k": self.k,
            "first_failure": None if fail is None else {"i": fail.i, "condition": fail.condition},
            "rows": [r.to_dict() for r in self.rows],
            "notes": list(self.notes),
            "extra": jsonable(self.extra),
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _row(i, condition, lhs, rhs, *, scale_terms=(), strict=False, gating=True, **quantities) -> CertRow:
    """Row for ``lhs >= rhs`` (or ``>`` when strict)."""
    lhs, rhs = float(lhs), float(rhs)
    scale = max([abs(lhs), abs(rhs)] + [abs(float(t)) for t in scale_terms])
    q = {k: float(v) if isinstance(v, (float, np.floating, int, np.integer)) else v for k, v in quantities.items()}
    q.update({"lhs": lhs, "rhs": rhs})
    return CertRow(i, condition, lhs - rhs, REL_TOL * scale, strict, gating, q)


def _increase_rows(a, lo: int, hi: int, strict=True, gating=True, name="a_increasing"):
    return [
        _row(i, name, a[i + 1], a[i], strict=strict, gating=gating)
        for i in range(lo, hi + 1)
    ]


def _require_symmetric(spec: RecurrenceSpec, n: int, theorem: str):
    if not spec.is_symmetric(n):
        raise WrongHypothesisError(f"{theorem} needs a symmetric spec (b == 0 through index {n})")


# ---------------------------------------------------------------- chain sequences

@dataclass(frozen=True)
class ChainVerdict:
    """Outcome of the minimal-parameter recursion ``m_i = g_i / (1 - m_{i-1})``.

    ``failure_index`` is 1-based (``g_1`` is the first term).
    """

    is_chain: bool
    minimal_params: np.ndarray
    failure_index: int | None
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "is_chain": self.is_chain,
            "minimal_params": self.minimal_params,
            "failure_index": self.failure_index,
            "reason": self.reason,
        }


def chain_sequence_test(g, allow_zero: bool = False) -> ChainVerdict:
    """Decide whether a finite sequence is a chain sequence.

    The minimal parameters must stay below 1; the final one may reach 1
    (``(1 - m_{n-1}) m_n = g_n`` needs no successor).
    """
    g = np.asarray(g, dtype=float).ravel()
    if g.size == 0:
        raise DomainError("chain test needs a nonempty sequence")
    n = g.size
    params = np.empty(n)
    prev = 0.0
    for idx in range(n):
        gi = g[idx]
        if not math.isfinite(gi) or gi < 0 or (gi == 0 and not allow_zero):
            return ChainVerdict(False, params[:idx].copy(), idx + 1, "nonpositive term")
        m = gi / (1.0 - prev)
        params[idx] = m
        last = idx == n - 1
        if m > 1.0 or (m == 1.0 and not last):
            return ChainVerdict(False, params[: idx + 1].copy(), idx + 1, "parameter reached 1")
        prev = m
    return ChainVerdict(True, params, None)


def constant_chain_threshold(n: int) -> float:
    """Largest constant ``g`` making a length-``n`` chain sequence."""
    return 0.25 / math.cos(math.pi / (n + 2)) ** 2


def c_from_chain_params(a, params) -> np.ndarray:
    """Normalization ``c`` (with ``c_0 = c_1 = 1``) realizing the chain parameters.

    ``params[i-1]`` is the parameter at index ``i``; the result has length
    ``len(params) + 2``.  Using the minimal parameters of the chain built from
    the T2 data makes the product inequality hold with equality.
    """
    a = np.asarray(a, dtype=float)
    params = np.asarray(params, dtype=float)
    n = params.size
    c = np.ones(n + 2)
    for i in range(1, n + 1):
        ai, an = a[i], a[i + 1]
        c[i + 1] = c[i] / (ai / an + params[i - 1] * (an * an - ai * ai) / (ai * an))
    return c


def t2_chain_terms(a, b, k: int) -> np.ndarray:
    """``a_i^2 (b_i - b_{i-1})^2 / (4 (a_{i+1}^2 - a_i^2)(a_i^2 - a_{i-1}^2))`` for ``i = 1..k``.

    At ``i = 1`` the ``a_0 = 0`` convention cancels ``a_1^2``.
    """
    out = np.empty(k)
    for i in range(1, k + 1):
        db = b[i] - b[i - 1]
        up = a[i + 1] ** 2 - a[i] ** 2
        if i == 1:
            out[0] = db * db / (4 * up)
        else:
            out[i - 1] = a[i] ** 2 * db * db / (4 * up * (a[i] ** 2 - a[i - 1] ** 2))
    return out


# ---------------------------------------------------------------- T2

def certify_T2_thm5(spec: RecurrenceSpec, k: int, mode: str = "explicit-c", allow_zero: bool = True) -> CertReport:
    """Sufficient conditions for ``T2(p_k) > 0``.

    ``explicit-c`` checks the product and ratio conditions with the spec's own
    ``c``; ``balanced`` checks the ``c``-free conditions valid for the balanced
    normalization; ``chain`` builds the chain-sequence data and runs
    :func:`chain_sequence_test` on it.
    """
    if k < 1:
        raise DomainError("T2 certification needs k >= 1")
    if mode not in ("explicit-c", "balanced", "chain"):
        raise DomainError(f"unknown T2 certification mode {mode!r}")
    a, b, c = spec.coefficients(k + 1)
    if mode == "explicit-c":
        rows = []
        for i in range(1, k + 1):
            f1 = a[i + 1] * c[i] / c[i + 1] - a[i]
            f2 = a[i] - a[i - 1] * c[i - 1] / c[i]
            lhs = 4 * f1 * f2
            rhs = (b[i] - b[i - 1]) ** 2
            rows.append(
                _row(i, "product", lhs, rhs, scale_terms=(4 * a[i + 1] * c[i] / c[i + 1] * a[i],), first=f1, second=f2)
            )
            rows.append(_row(i, "ratio", a[i + 1] / a[i], c[i + 1] / c[i], strict=True))
        return CertReport("thm5", spec.normalization.name, k, tuple(rows))

    inc = _increase_rows(a, 1, k)
    if not all(r.passed for r in inc):
        return CertReport(f"thm5-{mode}", _mode_norm(spec, mode), k, tuple(inc), ("a is not increasing",))

    if mode == "balanced":
        rows = list(inc)
        lhs = 2 * (a[2] ** 2 - a[1] ** 2)
        rows.append(_row(1, "first", lhs, (b[1] - b[0]) ** 2, scale_terms=(2 * a[2] ** 2,)))
        for i in range(2, k + 1):
            lhs = (a[i + 1] ** 2 - a[i] ** 2) * (a[i] ** 2 - a[i - 1] ** 2) / a[i] ** 2
            rows.append(
                _row(i, "balanced", lhs, (b[i] - b[i - 1]) ** 2, scale_terms=(a[i + 1] ** 2 * a[i] ** 2 / a[i] ** 2,))
            )
        return CertReport("thm5-balanced", NormKind.BALANCED.value, k, tuple(rows))

    if mode == "chain":
        u = t2_chain_terms(a, b, k)
        verdict = chain_sequence_test(u, allow_zero=allow_zero)
        rows = list(inc)
        m = verdict.minimal_params
        for i in range(1, len(m) + 1):
            last = i == k
            rows.append(
                CertRow(
                    i,
                    "chain",
                    float(1.0 - m[i - 1]),
                    0.0,
                    strict=not last,
                    quantities={"u": float(u[i - 1]), "m": float(m[i - 1])},
                )
            )
        if not verdict.is_chain and verdict.failure_index is not None and verdict.failure_index > len(m):
            i = verdict.failure_index
            rows.append(CertRow(i, "chain", float("nan"), 0.0, quantities={"u": float(u[i - 1])}))
        return CertReport(
            "thm5-chain", spec.normalization.name, k, tuple(rows), extra={"chain": verdict.to_dict()}
        )


def _mode_norm(spec, mode):
    return NormKind.BALANCED.value if mode == "balanced" else spec.normalization.name


def chain_to_explicit_c(spec: RecurrenceSpec, k: int, params) -> RecurrenceSpec:
    """Respec with the normalization built from chain parameters for indices ``1..k``."""
    a, _, _ = spec.coefficients(k + 1)
    c = c_from_chain_params(a, params)
    return spec.with_normalization(Normalization(NormKind.CUSTOM, tuple(float(v) for v in c)))


# ---------------------------------------------------------------- T4 symmetric

def third_difference(a, i: int) -> float:
    return a[i - 1] ** 2 - 3 * a[i] ** 2 + 3 * a[i + 1] ** 2 - a[i + 2] ** 2


def certify_T4_sym_thm7(spec: RecurrenceSpec, k: int) -> CertReport:
    """Strict increase plus a nonnegative third difference of ``a^2``."""
    if k < 2:
        raise DomainError("T4 certification needs k >= 2")
    _require_symmetric(spec, k + 1, "thm7")
    a, _, _ = spec.coefficients(k + 1)
    rows = _increase_rows(a, 1, k)
    for i in range(1, k):
        terms = (a[i - 1] ** 2, 3 * a[i] ** 2, 3 * a[i + 1] ** 2, a[i + 2] ** 2)
        rows.append(_row(i, "third_difference", third_difference(a, i), 0.0, scale_terms=terms))
    return CertReport("thm7", NormKind.MONIC.value, k, tuple(rows))


# ---------------------------------------------------------------- S4 symmetric

def s4_R(a, i: int) -> float:
    """The polynomial in ``a^2`` whose sign drives the S4 recursion at index ``i``."""
    A = lambda j: a[j] ** 2
    return (
        A(i + 1) * A(i) * (A(i - 1) - A(i - 2))
        - A(i) * A(i - 2) * (A(i) - A(i - 2))
        + A(i - 2) * A(i - 3) * (A(i) - A(i - 1))
    )


def _mp_closed_form_R(spec: RecurrenceSpec, i: int) -> float | None:
    if spec.family != "meixner-pollaczek":
        return None
    if abs(spec.params["phi"] - math.pi / 2) > 4 * math.ulp(math.pi / 2):
        return None
    lam = spec.params["lambda"]
    return 24 * (i + lam - 1) * (i + lam - 2) * (2 * i + lam - 3)


def certify_S4_sym_thm9(spec: RecurrenceSpec, k: int) -> CertReport:
    """Increase of ``a`` plus ``R_i >= 0`` for ``i = 3..k``; reports the simpler sufficient set too."""
    if k < 3:
        raise DomainError("S4 certification needs k >= 3")
    _require_symmetric(spec, k + 1, "thm9")
    a, _, _ = spec.coefficients(k + 2)
    rows = _increase_rows(a, 1, k)
    notes = []
    for i in range(3, k + 1):
        A = [a[j] ** 2 for j in range(i - 3, i + 2)]
        scale = max(A) ** 3
        q = {}
        closed = _mp_closed_form_R(spec, i)
        if closed is not None:
            q["closed_form_reported"] = closed
        rows.append(_row(i, "R", s4_R(a, i), 0.0, scale_terms=(scale,), **q))
    if any("closed_form_reported" in r.quantities for r in rows):
        notes.append("closed_form_reported is listed for comparison only; the verdict uses R directly")
    # simpler sufficient conditions, informational
    for i in range(1, k + 1):
        rows.append(_row(i, "lemma_increasing", a[i + 1], a[i], strict=True, gating=False))
        terms = (a[i + 1] ** 2, 2 * a[i] ** 2, a[i - 1] ** 2)
        rows.append(
            _row(i, "lemma_convex", a[i + 1] ** 2 - 2 * a[i] ** 2 + a[i - 1] ** 2, 0.0, scale_terms=terms, gating=False)
        )
        rows.append(_row(i, "lemma_ratio", a[i + 1] / a[i + 2], a[i] / a[i + 1], gating=False))
    lemma_ok = all(r.passed for r in rows if not r.gating)
    return CertReport(
        "thm9", NormKind.ORTHONORMAL.value, k, tuple(rows), tuple(notes), extra={"lemma_conditions_hold": lemma_ok}
    )


# ---------------------------------------------------------------- T4 general

@dataclass(frozen=True)
class QuadCoeffs:
    A: float
    B: float
    C: float


def thm10_coeffs(a, b, i: int) -> QuadCoeffs:
    A = 3 * a[i + 1] * a[i + 2] - 4 * a[i] * a[i + 2] + a[i - 1] * a[i]
    db = b[i] - b[i - 1]
    wide = b[i + 1] - b[i - 2]
    B = a[i - 1] * (4 * a[i + 2] - a[i - 1]) * db - a[i] ** 2 * wide
    C = (
        (a[i] - a[i - 1] + db) * wide
        + (a[i] - a[i - 1]) * (4 * a[i + 2] - a[i - 1])
        - a[i + 1] * (a[i + 1] - a[i - 2])
    )
    return QuadCoeffs(A, B, C)


def quad_margin(p0: float, p1: float, p2: float, tol: float) -> float:
    """Signed slack of ``p0 + p1 t + p2 t^2 >= 0`` on ``t >= 0``.

    Decided from the coefficient signs and the discriminant: the minimum over
    ``t >= 0`` when it is finite, otherwise the violating coefficient.
    """
    if p2 < -tol:
        return p2
    if p0 < -tol:
        return p0
    if p1 >= 0:
        return min(p0, p2)
    if abs(p2) <= tol:
        return p1
    return p0 - p1 * p1 / (4 * p2)


def certify_T4_thm10(spec: RecurrenceSpec, k: int, j: int = 1) -> CertReport:
    """Conditions giving ``T4(p_k) >= 0`` right of ``max(x_kk, b_k + a_k)`` (orthonormal)."""
    if not 1 <= j < k:
        raise DomainError("need 1 <= j < k")
    a, b, _ = spec.coefficients(k + 2)
    rows = []
    for i in range(0, k + 2):
        rows.append(_row(i, "a_nondecreasing", a[i + 1], a[i]))
        rows.append(_row(i, "b_nondecreasing", b[i + 1], b[i]))
    if not all(r.passed for r in rows):
        return CertReport("thm10", NormKind.ORTHONORMAL.value, k, tuple(rows), ("a or b decreases",))
    for i in range(j + 1, k + 1):
        q = thm10_coeffs(a, b, i)
        lead = a[i - 1]
        p0, p1, p2 = lead * q.A, q.B, lead * q.C
        scale = max(abs(p0), abs(p1), abs(p2), a[i + 2] ** 2, (b[i + 1] - b[i - 2]) ** 2)
        tol = REL_TOL * scale
        margin = quad_margin(p0, p1, p2, tol)
        rows.append(CertRow(i, "quadratic", float(margin), tol, quantities={"A": q.A, "B": q.B, "C": q.C}))
    for i in range(j, k):
        rows.append(_row(i, "b_step", a[i], b[i + 1] - b[i], scale_terms=(b[i + 1], b[i])))
    if j == 1:
        rows.append(_row(1, "start", a[2], 4.0 / 3.0 * a[1]))
    notes = () if j == 1 else ("the starting condition at j is assumed, not checked",)
    return CertReport("thm10", NormKind.ORTHONORMAL.value, k, tuple(rows), notes)


def certify_gamma_lemma7(params: TestSequenceParams, n: int = LEMMA7_RANGE) -> CertReport:
    """Direct check of ``alpha_i >= beta_{i+1} - beta_i`` for ``i = 1..n``."""
    spec, _ = test_sequences(params.r, params.s, params.gamma)
    a, b, _ = spec.coefficients(n + 1)
    i = np.arange(1, n + 1)
    step = b[i + 1] - b[i]
    margins = a[i] - step
    tols = REL_TOL * np.maximum.reduce([a[i], np.abs(b[i + 1]), np.abs(b[i])])
    ok = margins >= -tols
    worst = int(np.argmin(margins / np.maximum(a[i], 1.0)))
    rows = (
        CertRow(
            int(i[worst]),
            "alpha_covers_beta_step",
            float(margins[worst]),
            float(tols[worst]),
            quantities={"alpha": float(a[i[worst]]), "beta_step": float(step[worst])},
        ),
    )
    if not ok.all():
        first = int(np.argmax(~ok))
        rows = rows + (
            CertRow(int(i[first]), "alpha_covers_beta_step", float(margins[first]), float(tols[first])),
        )
    min_idx = int(np.argmin(margins))
    extra = {
        "gamma_ok": params.gamma_ok,
        "gamma_max": params.gamma_max,
        "range": [1, n],
        "min_margin": float(margins[min_idx]),
        "min_margin_index": int(i[min_idx]),
        "violations": int((~ok).sum()),
    }
    return CertReport("lemma7", NormKind.ORTHONORMAL.value, n, rows, extra=extra)
