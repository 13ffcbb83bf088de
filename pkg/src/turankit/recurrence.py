"""Coefficient sequences of the three-term recurrence

    (a_k / c_k) p_k = (x - b_{k-1}) p_{k-1} - a_{k-1} c_{k-1} p_{k-2},
    p_{-1} = 0,  p_0 = 1.

``a`` and ``b`` fix the family (and its zeros); ``c`` only fixes the
normalization.  ``c_k = 1`` gives orthonormal polynomials, ``c_k = a_k`` monic
ones.  Changing ``c`` multiplies ``p_k`` by ``d_k = c_1 c_2 ... c_k`` relative
to the orthonormal family.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Mapping

import numpy as np

from .errors import DomainError, OutOfRangeError

CoefFn = Callable[[np.ndarray], "tuple[np.ndarray, np.ndarray]"]


class NormKind(str, Enum):
    ORTHONORMAL = "orthonormal"
    MONIC = "monic"
    BALANCED = "balanced"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Normalization:
    kind: NormKind
    c: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind is NormKind.CUSTOM:
            if not self.c:
                raise DomainError("custom normalization needs an explicit c table")
            if any(not (ci > 0 and math.isfinite(ci)) for ci in self.c[1:]):
                raise DomainError("custom c_k must be positive and finite for k >= 1")
        elif self.c is not None:
            raise DomainError(f"{self.kind.value} normalization takes no c table")

    @property
    def name(self) -> str:
        return self.kind.value


ORTHONORMAL = Normalization(NormKind.ORTHONORMAL)
MONIC = Normalization(NormKind.MONIC)
BALANCED = Normalization(NormKind.BALANCED)


def parse_normalization(value) -> Normalization:
    if isinstance(value, Normalization):
        return value
    if value is None:
        return ORTHONORMAL
    try:
        kind = NormKind(str(value).lower())
    except ValueError:
        raise DomainError(f"unknown normalization {value!r}") from None
    if kind is NormKind.CUSTOM:
        raise DomainError("custom normalization needs a c table (use custom.c)")
    return Normalization(kind)


def _balanced_c(a: np.ndarray) -> np.ndarray:
    # c_1 = 1, c_k = prod_{j<k} 2 r_j / (1 + r_j^2) with r_j = a_j / a_{j+1};
    # accumulated in log space since every factor is <= 1.
    n = len(a) - 1
    c = np.ones(n + 1)
    if n >= 2:
        r = a[1:n] / a[2 : n + 1]
        logs = np.log(2.0 * r / (1.0 + r * r))
        c[2:] = np.exp(np.cumsum(logs))
    return c


@dataclass(frozen=True, eq=False)
class RecurrenceSpec:
    """Immutable description of one recurrence family in one normalization.

    Coefficients are served by :meth:`coefficients`, which evaluates the closed
    form (or table) for a contiguous index range; scalar accessors go through
    the same path so every query for an index returns the same double.
    """

    family: str
    params: Mapping[str, float]
    normalization: Normalization
    max_index: int | None
    coef_fn: CoefFn = field(repr=False)
    reflected: bool = False

    def coefficients(self, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Arrays ``a, b, c`` holding indices ``0..n``."""
        n = int(n)
        if n < 0:
            raise DomainError("coefficient index must be nonnegative")
        if self.max_index is not None and n > self.max_index:
            raise OutOfRangeError(f"index {n} beyond table end {self.max_index} for {self.family}")
        ks = np.arange(n + 1)
        a, b = self.coef_fn(ks)
        a = np.array(a, dtype=float)
        b = np.array(b, dtype=float)
        a[0] = 0.0
        if self.reflected:
            b = -b
        if n >= 1 and not (np.all(a[1:] > 0) and np.all(np.isfinite(a[1:]))):
            bad = int(np.argmin((a[1:] > 0) & np.isfinite(a[1:]))) + 1
            raise DomainError(f"a_{bad} = {a[bad]} is not positive and finite")
        return a, b, self._c(a, n)

    def _c(self, a: np.ndarray, n: int) -> np.ndarray:
        kind = self.normalization.kind
        if kind is NormKind.ORTHONORMAL:
            return np.ones(n + 1)
        if kind is NormKind.MONIC:
            c = a.copy()
            c[0] = 1.0
            return c
        if kind is NormKind.BALANCED:
            return _balanced_c(a)
        table = self.normalization.c
        if len(table) <= n:
            raise OutOfRangeError(f"custom c table ends at index {len(table) - 1}, need {n}")
        c = np.array(table[: n + 1], dtype=float)
        c[0] = 1.0
        return c

    def a(self, k: int) -> float:
        return float(self.coefficients(k)[0][k])

    def b(self, k: int) -> float:
        return float(self.coefficients(k)[1][k])

    def c(self, k: int) -> float:
        return float(self.coefficients(k)[2][k])

    def is_symmetric(self, n: int) -> bool:
        """True when ``b_0 .. b_n`` all vanish."""
        return bool(np.all(self.coefficients(n)[1] == 0.0))

    def log_degree_factors(self, n: int) -> np.ndarray:
        """``log d_k`` for ``k = 0..n`` where ``p_k = d_k * (orthonormal p_k)``."""
        c = self.coefficients(n)[2]
        out = np.zeros(n + 1)
        out[1:] = np.cumsum(np.log(c[1:]))
        return out

    def with_normalization(self, norm: Normalization) -> "RecurrenceSpec":
        return replace(self, normalization=norm)

    def describe(self) -> dict:
        return {
            "family": self.family,
            "params": dict(self.params),
            "normalization": self.normalization.name,
            "reflected": self.reflected,
            "max_index": self.max_index,
        }


def renormalize(spec: RecurrenceSpec, target) -> RecurrenceSpec:
    return spec.with_normalization(parse_normalization(target))


def normalization_factors(src: RecurrenceSpec, dst: RecurrenceSpec, n: int) -> np.ndarray:
    """Ratios ``d_k`` with ``p_k[dst] = d_k * p_k[src]`` for ``k = 0..n``."""
    return np.exp(dst.log_degree_factors(n) - src.log_degree_factors(n))


def reflect(spec: RecurrenceSpec) -> RecurrenceSpec:
    """Family of ``(-1)**k p_k(-x)``: ``b`` changes sign, ``a`` and ``c`` stay."""
    return replace(spec, reflected=not spec.reflected)


# ---------------------------------------------------------------- families

def _require(cond: bool, msg: str):
    if not cond:
        raise DomainError(msg)


def _angle_trig(phi: float) -> tuple[float, float]:
    """``(sin phi, cot phi)`` with the right angle treated exactly."""
    if abs(phi - math.pi / 2) <= 4 * math.ulp(math.pi / 2):
        return 1.0, 0.0
    return math.sin(phi), math.cos(phi) / math.sin(phi)


def _stieltjes_wigert(q: float) -> CoefFn:
    _require(0 < q < 1, f"Stieltjes-Wigert needs 0 < q < 1, got q={q}")

    def fn(ks):
        k = ks.astype(float)
        a = q ** (-2 * k) * np.sqrt(q * (1 - q**k))
        b = q ** (-2 * k - 1) * (1 + q - q ** (k + 1))
        return a, b

    return fn


def _al_salam_carlitz(q: float, alpha: float) -> CoefFn:
    _require(0 < q < 1, f"Al-Salam-Carlitz needs 0 < q < 1, got q={q}")
    _require(alpha > 0, f"Al-Salam-Carlitz needs alpha > 0, got alpha={alpha}")

    def fn(ks):
        k = ks.astype(float)
        a = q ** (-k) * np.sqrt(alpha * q * (1 - q**k))
        b = (alpha + 1) * q ** (-k)
        return a, b

    return fn


def _meixner_pollaczek(lam: float, phi: float) -> CoefFn:
    _require(lam > 0, f"Meixner-Pollaczek needs lambda > 0, got lambda={lam}")
    _require(0 < phi < math.pi, f"Meixner-Pollaczek needs 0 < phi < pi, got phi={phi}")
    sin_phi, cot_phi = _angle_trig(phi)

    def fn(ks):
        k = ks.astype(float)
        a = np.sqrt(k * (k + 2 * lam - 1)) / (2 * sin_phi)
        b = (k + lam) * cot_phi
        return a, b

    return fn


def _hermite_like(c: float, r: float) -> CoefFn:
    _require(c > 0, f"hermite-like needs c > 0, got c={c}")

    def fn(ks):
        k = ks.astype(float)
        with np.errstate(divide="ignore"):
            a = c * k**r
        return a, np.zeros_like(k)

    return fn


def _power_law(r: float, s: float, gamma: float) -> CoefFn:
    _require(s >= 0, f"power-law needs s >= 0, got s={s}")

    def fn(ks):
        k = ks.astype(float)
        with np.errstate(divide="ignore"):
            a = k**r
        return a, gamma * k**s

    return fn


def _table(a_tab, b_tab) -> CoefFn:
    a_arr = np.asarray(a_tab, dtype=float)
    b_arr = np.asarray(b_tab, dtype=float)

    def fn(ks):
        return a_arr[ks], b_arr[ks]

    return fn


@dataclass(frozen=True)
class TestSequenceParams:
    """Parameters of the power-law test sequences

    alpha_0 = 0, alpha_1 = (m+2)**r / 2, alpha_i = (i+m)**r (i >= 2),
    beta_i = gamma (i+m)**s,

    whose offset ``m`` makes ``alpha_3 / alpha_2`` exactly 3/2.
    """

    __test__ = False  # not a pytest class

    r: float
    s: float
    gamma: float
    m: float
    rho: float
    gamma_max: float

    @property
    def gamma_ok(self) -> bool:
        return self.gamma <= self.gamma_max * (1 + 1e-12)

    @property
    def m_bracket(self) -> tuple[float, float]:
        base = self.r / math.log(1.5)
        return base - 2.5, base - math.sqrt(2) - 1

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "gamma": self.gamma,
            "m": self.m,
            "rho": self.rho,
            "gamma_max": self.gamma_max,
            "gamma_ok": self.gamma_ok,
        }


def offset_m(r: float) -> float:
    return 1.0 / (1.5 ** (1.0 / r) - 1.0) - 2.0


def gamma_max(r: float, s: float, m: float | None = None) -> float:
    """Largest ``gamma`` with ``alpha_i >= beta_{i+1} - beta_i`` guaranteed."""
    if m is None:
        m = offset_m(r)
    if s == 0:
        return math.inf  # beta is constant
    if s < 1:
        return (m + 2) ** (r - s + 1) / (2 * s)
    return (m + 3) ** (r - s + 1) / (3 * s)


def test_sequence_params(r: float, s: float, gamma: float) -> TestSequenceParams:
    _require(r >= 1, f"test sequences need r >= 1, got r={r}")
    _require(0 <= s < r + 1, f"test sequences need 0 <= s < r + 1, got s={s}")
    _require(gamma >= 0, f"test sequences need gamma >= 0, got gamma={gamma}")
    m = offset_m(r)
    rho = (2.0 / 3.0) * min(1.0, r - s + 1)
    return TestSequenceParams(r=r, s=s, gamma=gamma, m=m, rho=rho, gamma_max=gamma_max(r, s, m))


test_sequence_params.__test__ = False


def _test_sequence(r: float, s: float, gamma: float) -> CoefFn:
    m = offset_m(r)

    def fn(ks):
        k = ks.astype(float)
        a = (k + m) ** r
        a = np.where(ks == 1, (m + 2) ** r / 2, a)
        b = gamma * (k + m) ** s
        return a, b

    return fn


def test_sequences(r: float, s: float, gamma: float, normalization=ORTHONORMAL):
    """Orthonormal spec of the test sequences plus their parameter record."""
    params = test_sequence_params(r, s, gamma)
    spec = RecurrenceSpec(
        family="test-sequence",
        params={"r": r, "s": s, "gamma": gamma},
        normalization=parse_normalization(normalization),
        max_index=None,
        coef_fn=_test_sequence(r, s, gamma),
    )
    return spec, params


test_sequences.__test__ = False

# name -> (builder, parameter names, default normalization)
FAMILIES: dict[str, tuple[Callable[..., CoefFn], tuple[str, ...], Normalization]] = {
    "stieltjes-wigert": (_stieltjes_wigert, ("q",), ORTHONORMAL),
    "al-salam-carlitz": (_al_salam_carlitz, ("q", "alpha"), ORTHONORMAL),
    "meixner-pollaczek": (_meixner_pollaczek, ("lambda", "phi"), ORTHONORMAL),
    "hermite-like": (_hermite_like, ("c", "r"), ORTHONORMAL),
    "power-law": (_power_law, ("r", "s", "gamma"), ORTHONORMAL),
    "test-sequence": (_test_sequence, ("r", "s", "gamma"), ORTHONORMAL),
}

# presets: name -> (family, params, normalization)
ALIASES = {
    "hermite-monic": ("hermite-like", {"c": 1.0, "r": 0.5}, MONIC),
    "hermite": ("hermite-like", {"c": 1.0, "r": 0.5}, ORTHONORMAL),
}

_ANGLE = re.compile(r"^\s*(?:([0-9.]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9.]+))?\s*$", re.IGNORECASE)


def parse_angle(value) -> float:
    """Radians from a number or a string such as ``"pi/2"`` or ``"3*pi/4"``."""
    if isinstance(value, (int, float)):
        return float(value)
    m = _ANGLE.match(str(value))
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(value)
    except ValueError:
        raise DomainError(f"cannot parse angle {value!r}") from None


def build_family(name: str, params: Mapping | None = None, normalization=None) -> RecurrenceSpec:
    params = dict(params or {})
    if name in ALIASES:
        base, preset, norm = ALIASES[name]
        merged = {**preset, **params}
        return build_family(base, merged, normalization if normalization is not None else norm)
    if name == "custom":
        raise DomainError("custom families are built with custom_family()")
    if name not in FAMILIES:
        raise DomainError(f"unknown family {name!r}")
    builder, names, default_norm = FAMILIES[name]
    unknown = set(params) - set(names)
    if unknown:
        raise DomainError(f"unknown parameters for {name}: {sorted(unknown)}")
    missing = [p for p in names if p not in params]
    if missing:
        raise DomainError(f"missing parameters for {name}: {missing}")
    values = {}
    for p in names:
        values[p] = parse_angle(params[p]) if p == "phi" else float(params[p])
    if name == "test-sequence":
        test_sequence_params(values["r"], values["s"], values["gamma"])
    fn = builder(*(values[p] for p in names))
    norm = parse_normalization(normalization) if normalization is not None else default_norm
    return RecurrenceSpec(family=name, params=values, normalization=norm, max_index=None, coef_fn=fn)


def custom_family(a, b=None, c=None, normalization=None) -> RecurrenceSpec:
    """Spec backed by finite tables indexed ``0..max_index``.

    ``a[0]`` must be 0 (or omitted as such); a missing ``b`` means ``b = 0``.
    """
    a = [float(v) for v in a]
    if not a:
        raise DomainError("custom a table is empty")
    if a[0] != 0.0:
        raise DomainError("custom a table must start with a_0 = 0")
    if b is None:
        b = [0.0] * len(a)
    b = [float(v) for v in b]
    if len(b) != len(a):
        raise DomainError(f"custom tables differ in length: len(a)={len(a)}, len(b)={len(b)}")
    if any(not math.isfinite(v) for v in a + b):
        raise DomainError("custom tables must be finite")
    if c is not None:
        c = [float(v) for v in c]
        if len(c) != len(a):
            raise DomainError(f"custom c table has length {len(c)}, expected {len(a)}")
        norm = Normalization(NormKind.CUSTOM, tuple([1.0] + c[1:]))
    else:
        norm = parse_normalization(normalization)
    return RecurrenceSpec(
        family="custom",
        params={},
        normalization=norm,
        max_index=len(a) - 1,
        coef_fn=_table(a, b),
    )


_DOC_KEYS = {"family", "params", "normalization", "custom"}


def load_family(doc) -> RecurrenceSpec:
    """Build a spec from a JSON document (string or already-parsed mapping).

    ``{"family": ..., "params": {...}, "normalization": ..., "custom": {"a": [...], "b": [...], "c": [...]}}``

    ``custom`` may give ``a2`` (the squares) instead of ``a``.
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise DomainError(f"malformed family JSON: {exc}") from None
    if not isinstance(doc, Mapping):
        raise DomainError("family document must be a JSON object")
    unknown = set(doc) - _DOC_KEYS
    if unknown:
        raise DomainError(f"unknown keys in family document: {sorted(unknown)}")
    name = doc.get("family")
    if name is None:
        raise DomainError("family document needs a 'family' key")
    if name == "custom":
        tables = doc.get("custom")
        if not isinstance(tables, Mapping):
            raise DomainError("custom family needs a 'custom' object with tables")
        extra = set(tables) - {"a", "a2", "b", "c"}
        if extra:
            raise DomainError(f"unknown keys in custom tables: {sorted(extra)}")
        if ("a" in tables) == ("a2" in tables):
            raise DomainError("custom tables need exactly one of 'a' or 'a2'")
        a = tables["a"] if "a" in tables else [math.sqrt(float(v)) for v in tables["a2"]]
        return custom_family(a, tables.get("b"), tables.get("c"), doc.get("normalization"))
    if "custom" in doc:
        raise DomainError("'custom' tables are only allowed with family 'custom'")
    return build_family(name, doc.get("params"), doc.get("normalization"))
