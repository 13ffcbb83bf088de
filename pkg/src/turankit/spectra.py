"""Zeros of ``p_k`` as eigenvalues of the Jacobi matrix, and bounds on the extreme ones.

``J_k`` has diagonal ``b_0 .. b_{k-1}`` and off-diagonal ``a_1 .. a_{k-1}``;
its eigenvalues are the zeros of ``p_k`` in every normalization.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .certify import certify_T2_thm5
from .errors import DivergenceError, DomainError, WrongHypothesisError
from .recurrence import NormKind, RecurrenceSpec, TestSequenceParams, test_sequence_params
from .report import jsonable

MAX_ITER = 200
REL_TOL = 1e-10
SMALL_K = 64
_WIDEN_LIMIT = 2.0**60


def _jacobi(spec: RecurrenceSpec, k: int):
    a, b, _ = spec.coefficients(k)
    return a[: k], b[: k]  # a[i] couples rows i-1, i for i >= 1


def sturm_count(spec: RecurrenceSpec, k: int, x, *, _ab=None) -> np.ndarray | int:
    """Number of zeros of ``p_k`` strictly below ``x`` (vectorized over ``x``).

    Pivots of ``J_k - x I`` follow ``d_0 = b_0 - x``,
    ``d_i = (b_i - x) - a_i^2 / d_{i-1}``; negative pivots are counted.  An
    exactly zero pivot is replaced by ``+tiny * scale``, the value it takes
    for ``x`` nudged one step down, so ties at an eigenvalue count as
    "not below".
    """
    if k < 1:
        raise DomainError("sturm_count needs k >= 1")
    a, b = _ab if _ab is not None else _jacobi(spec, k)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    scale = 1.0 + np.abs(xs) + (np.max(np.abs(b)) if b.size else 0.0) + (np.max(a) if a.size else 0.0)
    tiny = np.finfo(float).eps * scale
    with np.errstate(over="ignore"):
        a2 = a * a
    if not np.all(np.isfinite(a2)):
        raise DivergenceError("squared off-diagonal coefficients overflow the double range")
    d = b[0] - xs
    d = np.where(d == 0.0, tiny, d)
    count = (d < 0).astype(np.int64)
    with np.errstate(over="ignore"):
        for i in range(1, k):
            d = (b[i] - xs) - a2[i] / d
            d = np.where(d == 0.0, tiny, d)
            count += d < 0
    return int(count[0]) if np.ndim(x) == 0 else count


def gershgorin_interval(spec: RecurrenceSpec, k: int) -> tuple[float, float]:
    a, b = _jacobi(spec, k)
    left = np.concatenate([a, [0.0]])[:k]  # a_i couples to the row above
    right = np.concatenate([a[1:], [0.0]])[:k]
    rad = left + right
    return float(np.min(b - rad)), float(np.max(b + rad))


@dataclass(frozen=True)
class ZeroEstimate:
    k: int
    x_1k: float
    x_kk: float
    tol: float
    iterations: tuple[int, int]
    bracket: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "x_1k": self.x_1k,
            "x_kk": self.x_kk,
            "tol": self.tol,
            "iterations": list(self.iterations),
            "bracket": list(self.bracket),
        }


def _bracket(spec, k, ab):
    lo, hi = gershgorin_interval(spec, k)
    width = max(hi - lo, 1.0)
    lo, hi = lo - 1e-12 * width, hi + 1e-12 * width
    step = width
    while sturm_count(spec, k, lo, _ab=ab) > 0 or sturm_count(spec, k, hi, _ab=ab) < k:
        if step > _WIDEN_LIMIT * (1.0 + abs(lo) + abs(hi)) or not math.isfinite(step):
            raise DivergenceError("could not bracket the zeros; coefficients look malformed")
        lo, hi = lo - step, hi + step
        step *= 2.0
    return lo, hi


def _bisect_indices(spec, k, idx: np.ndarray, tol, ab, lo, hi):
    """Bisection for the eigenvalues with 1-based ranks ``idx`` (vectorized)."""
    n = idx.size
    los = np.full(n, lo)
    his = np.full(n, hi)
    it = np.zeros(n, dtype=np.int64)
    for _ in range(MAX_ITER):
        active = his - los > tol
        if not active.any():
            break
        mid = 0.5 * (los + his)
        cnt = sturm_count(spec, k, mid, _ab=ab)
        below = cnt >= idx  # rank-th zero lies below mid
        his = np.where(active & below, mid, his)
        los = np.where(active & ~below, mid, los)
        it += active
    return 0.5 * (los + his), it


def _default_tol(lo, hi):
    return REL_TOL * (1.0 + max(abs(lo), abs(hi)))


def extreme_zeros(spec: RecurrenceSpec, k: int, tol: float | None = None) -> ZeroEstimate:
    if k < 1:
        raise DomainError("extreme_zeros needs k >= 1")
    if tol is not None and not tol > 0:
        raise DomainError("tol must be positive")
    ab = _jacobi(spec, k)
    if k == 1:
        b0 = float(ab[1][0])
        return ZeroEstimate(1, b0, b0, 0.0, (0, 0), (b0, b0))
    lo, hi = _bracket(spec, k, ab)
    tol = tol if tol is not None else _default_tol(lo, hi)
    vals, it = _bisect_indices(spec, k, np.array([1, k]), tol, ab, lo, hi)
    return ZeroEstimate(k, float(vals[0]), float(vals[1]), tol, (int(it[0]), int(it[1])), (lo, hi))


def zero_by_index(spec: RecurrenceSpec, k: int, j: int, tol: float | None = None) -> float:
    """The ``j``-th smallest zero of ``p_k`` (``j`` is 1-based)."""
    if not 1 <= j <= k:
        raise DomainError(f"zero index {j} outside 1..{k}")
    ab = _jacobi(spec, k)
    if k == 1:
        return float(ab[1][0])
    lo, hi = _bracket(spec, k, ab)
    tol = tol if tol is not None else _default_tol(lo, hi)
    vals, _ = _bisect_indices(spec, k, np.array([j]), tol, ab, lo, hi)
    return float(vals[0])


def all_zeros_small(spec: RecurrenceSpec, k: int, tol: float | None = None) -> np.ndarray:
    if not 1 <= k <= SMALL_K:
        raise DomainError(f"all_zeros_small supports 1 <= k <= {SMALL_K}")
    ab = _jacobi(spec, k)
    if k == 1:
        return np.array([float(ab[1][0])])
    lo, hi = _bracket(spec, k, ab)
    tol = tol if tol is not None else _default_tol(lo, hi)
    vals, _ = _bisect_indices(spec, k, np.arange(1, k + 1), tol, ab, lo, hi)
    return vals


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class BoundEntry:
    name: str
    target: str  # "x_kk" or "x_1k"
    side: str  # "lower" or "upper"
    value: float
    applicable: bool
    hypothesis: dict = field(default_factory=dict)
    certified: bool = True  # False for asymptotic formulas

    def violated(self, z: ZeroEstimate, tol: float) -> bool:
        if not (self.applicable and self.certified):
            return False
        truth = z.x_kk if self.target == "x_kk" else z.x_1k
        return truth > self.value + tol if self.side == "upper" else truth < self.value - tol

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "target": self.target,
            "side": self.side,
            "value": self.value,
            "applicable": self.applicable,
            "certified": self.certified,
            "hypothesis": self.hypothesis,
        }


@dataclass(frozen=True)
class BoundReport:
    spec: dict
    k: int
    zeros: ZeroEstimate
    entries: tuple[BoundEntry, ...]

    def entry(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def violations(self, tol: float = 1e-8) -> list[BoundEntry]:
        return [e for e in self.entries if e.violated(self.zeros, tol)]

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "k": self.k,
            "zeros": self.zeros.to_dict(),
            "entries": [e.to_dict() for e in self.entries],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "target", "side", "value", "applicable", "certified", "x_1k", "x_kk"])
        for e in self.entries:
            w.writerow([e.name, e.target, e.side, repr(e.value), e.applicable, e.certified,
                        repr(self.zeros.x_1k), repr(self.zeros.x_kk)])
        return buf.getvalue()


def _nondecreasing(v: np.ndarray) -> bool:
    return bool(np.all(np.diff(v) >= 0))


def lemma4_bounds(a, b, k) -> tuple[float, float]:
    """Extreme eigenvalues of the 2x2 principal blocks: lower on x_kk, upper on x_1k."""
    i = np.arange(2, k + 1)
    mid = (b[i - 1] + b[i - 2]) / 2
    half = np.sqrt(4 * a[i - 1] ** 2 + (b[i - 1] - b[i - 2]) ** 2) / 2
    return float(np.max(mid + half)), float(np.min(mid - half))


def rayleigh_trials(k: int) -> list[tuple[str, np.ndarray]]:
    """Unit trial vectors: coordinate vectors, the uniform vector, a top-corner ramp."""
    out = [(f"e_{i}", np.eye(k)[i]) for i in range(k)]
    out.append(("uniform", np.full(k, 1 / math.sqrt(k))))
    L = min(k, 2 * math.ceil(k ** (1 / 3)))
    v = np.zeros(k)
    v[k - L:] = np.arange(1, L + 1, dtype=float)  # weight grows toward the last row
    out.append(("top_ramp", v / np.linalg.norm(v)))
    return out


def rayleigh_values(a, b, k) -> dict[str, float]:
    vals = {}
    for name, v in rayleigh_trials(k):
        vals[name] = float(np.sum(b[:k] * v * v) + 2 * np.sum(a[1:k] * v[1:] * v[:-1]))
    return vals


def bound_report(
    spec: RecurrenceSpec,
    k: int,
    delta: float | None = None,
    params: TestSequenceParams | None = None,
    tol: float | None = None,
) -> BoundReport:
    """All bounds on the extreme zeros of ``p_k`` next to bisection ground truth.

    Every entry carries the hypothesis check it relies on; inapplicable
    entries keep their value for reference but are flagged.
    """
    if k < 3:
        raise DomainError("bound_report needs k >= 3")
    z = extreme_zeros(spec, k, tol)
    a, b, c = spec.coefficients(k + 1)
    entries = []

    hi4, lo4 = lemma4_bounds(a, b, k)
    entries.append(BoundEntry("lemma4_lower_on_xkk", "x_kk", "lower", hi4, True))
    entries.append(BoundEntry("lemma4_upper_on_x1k", "x_1k", "upper", lo4, True))

    mono = {"a_nondecreasing": _nondecreasing(a[: k]), "b_nondecreasing": _nondecreasing(b[: k])}
    gers = max(b[k - 2] + a[k - 2] + a[k - 1], b[k - 1] + a[k - 1])
    entries.append(BoundEntry("gershgorin", "x_kk", "upper", float(gers), all(mono.values()), dict(mono)))

    ray = rayleigh_values(a, b, k)
    best = max(ray, key=ray.get)
    worst = min(ray, key=ray.get)
    entries.append(BoundEntry("rayleigh_lower", "x_kk", "lower", ray[best], True, {"trial": best}))
    entries.append(BoundEntry("rayleigh_upper_on_x1k", "x_1k", "upper", ray[worst], True, {"trial": worst}))

    # product/ratio conditions up to k-1 bound the zeros of p_k
    explicit = certify_T2_thm5(spec, k - 1, "explicit-c")
    h56 = {"certificate": "thm5 explicit-c", "through": k - 1, "verdict": explicit.verdict,
           "normalization": spec.normalization.name}
    r56 = 2 * math.sqrt(a[k] * a[k - 1] * c[k - 1] / c[k])
    entries.append(BoundEntry("thm11_56_upper", "x_kk", "upper", float(b[k - 1] + r56), explicit.passed, h56))
    entries.append(BoundEntry("thm11_56_lower", "x_1k", "lower", float(b[k - 1] - r56), explicit.passed, h56))

    balanced = certify_T2_thm5(spec, k - 1, "balanced")
    h57 = {"certificate": "thm5 balanced", "through": k - 1, "verdict": balanced.verdict}
    r57 = math.sqrt(2 * (a[k - 1] ** 2 + a[k] ** 2))
    entries.append(BoundEntry("thm11_57_upper", "x_kk", "upper", float(b[k - 1] + r57), balanced.passed, h57))
    entries.append(BoundEntry("thm11_57_lower", "x_1k", "lower", float(b[k - 1] - r57), balanced.passed, h57))

    lhs = 4 * a[k - 2] ** 2 - 3 * a[k - 1] ** 2
    rhs = 2 * a[k - 1] * (b[k - 1] - b[k - 2])
    h12 = {"condition_lhs": float(lhs), "condition_rhs": float(rhs), "condition": bool(lhs >= rhs), **mono}
    entries.append(
        BoundEntry("lemma12", "x_kk", "upper", float(b[k - 2] + 2 * a[k - 2]), bool(lhs >= rhs) and all(mono.values()), h12)
    )

    if params is None and spec.family == "test-sequence":
        p = spec.params
        params = test_sequence_params(p["r"], p["s"], p["gamma"])
    if params is not None and delta is not None:
        try:
            val = thm2_bound(params, k, delta)
            ok, why = True, "delta within case table, gamma within cap"
        except DomainError as exc:
            val, ok, why = _thm2_formula(params, k, delta), False, str(exc)
        entries.append(
            BoundEntry("thm2_eq3", "x_kk", "upper", float(val), ok,
                       {"delta": delta, "reason": why, **params.to_dict()}, certified=False)
        )
    return BoundReport(spec.describe(), k, z, tuple(entries))


# ---------------------------------------------------------------- large-degree bound

def thm2_delta_cap(params: TestSequenceParams, narrow: bool = False) -> float:
    r, s, g = params.r, params.s, params.gamma
    if s < r:
        return 2 * r
    if s == r:
        return (2 + g) * r
    limit = r + 0.5 if narrow else r + 1
    if s < limit:
        return g * s
    raise DomainError(f"s={s} outside the admissible range s < {limit}")


def _thm2_formula(params: TestSequenceParams, k: int, delta: float) -> float:
    r, s, g = params.r, params.s, params.gamma
    return g * k**s + k**r * (2 - 2 ** (-4 / 3) * delta ** (2 / 3) * k ** (-params.rho))


def thm2_bound(params: TestSequenceParams, k: int, delta: float, narrow: bool = False) -> float:
    """``gamma k^s + k^r (2 - 2^{-4/3} delta^{2/3} k^{-rho})`` without its o-term.

    Asymptotic: claimed only for sufficiently large ``k``.
    """
    if k < 1:
        raise DomainError("k must be positive")
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    cap = thm2_delta_cap(params, narrow)
    if not delta < cap:
        raise DomainError(f"delta={delta} must be below the case bound {cap}")
    if not params.gamma_ok:
        raise DomainError(f"gamma={params.gamma} exceeds gamma_max={params.gamma_max}")
    return _thm2_formula(params, k, delta)


@dataclass(frozen=True)
class PerturbationResult:
    epsilon: float
    delta: float
    bound: float
    actual_gap: float
    tol: float

    @property
    def holds(self) -> bool:
        return self.actual_gap < self.bound + 2 * self.tol or self.actual_gap == 0.0

    def to_dict(self) -> dict:
        return jsonable({
            "epsilon": self.epsilon,
            "delta": self.delta,
            "bound": self.bound,
            "actual_gap": self.actual_gap,
            "tol": self.tol,
            "holds": self.holds,
        })


def perturbation_gap(spec_a: RecurrenceSpec, spec_b: RecurrenceSpec, k: int, tol: float | None = None) -> PerturbationResult:
    """Shift of the largest zero against ``2 max|da| + max|db|``."""
    for s in (spec_a, spec_b):
        if s.normalization.kind is not NormKind.ORTHONORMAL:
            raise WrongHypothesisError("perturbation bound is stated for orthonormal specs")
    a1, b1, _ = spec_a.coefficients(k - 1)
    a2, b2, _ = spec_b.coefficients(k - 1)
    eps = float(np.max(np.abs(a1[1:k] - a2[1:k]))) if k > 1 else 0.0
    dlt = float(np.max(np.abs(b1[:k] - b2[:k])))
    if tol is None:
        lo, hi = gershgorin_interval(spec_a, k)
        tol = 1e-12 * (1.0 + max(abs(lo), abs(hi)))
    if eps == 0.0 and dlt == 0.0:
        return PerturbationResult(0.0, 0.0, 0.0, 0.0, tol)
    za = extreme_zeros(spec_a, k, tol)
    zb = extreme_zeros(spec_b, k, tol)
    return PerturbationResult(eps, dlt, 2 * eps + dlt, abs(za.x_kk - zb.x_kk), tol)
