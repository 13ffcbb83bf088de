import math

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from turankit.errors import DomainError, SingularityError
from turankit.evalkernel import (
    TuranOp,
    eval_window,
    kform_coefficients,
    kform_residual,
    poly_coeffs_exact,
    quadratic_forms,
    s4_general_coeffs,
    turan,
    turan_grid,
    turan_xi,
    xi_optimal,
)
from turankit.recurrence import BALANCED, MONIC, ORTHONORMAL, build_family, custom_family, normalization_factors


def mp_values(spec, k, x, prec=120):
    """Reference p_0..p_k by the recurrence in multiprecision."""
    mpmath.mp.prec = prec
    a, b, c = spec.coefficients(k + 2)
    a = [mpmath.mpf(float(v)) for v in a]
    b = [mpmath.mpf(float(v)) for v in b]
    c = [mpmath.mpf(float(v)) for v in c]
    x = mpmath.mpf(x)
    vals = [mpmath.mpf(1)]
    prev = mpmath.mpf(0)
    for j in range(1, k + 1):
        nxt = c[j] / a[j] * ((x - b[j - 1]) * vals[-1] - a[j - 1] * c[j - 1] * prev)
        prev = vals[-1]
        vals.append(nxt)
    return vals


# ---------------------------------------------------------------- windows

def test_first_steps_by_hand():
    herm = build_family("hermite")
    assert eval_window(herm, 1, 1.0).p(1).to_float()[0] == pytest.approx(1.0)
    p2 = eval_window(herm, 2, 0.0).p(2).to_float()[0]
    assert p2 == pytest.approx(-1 / math.sqrt(2), rel=1e-15)


def test_window_matches_multiprecision_recurrence():
    spec = build_family("meixner-pollaczek", {"lambda": 1.5, "phi": 1.1})
    for x in (-4.0, 0.3, 2.7):
        ref = mp_values(spec, 14, x)
        w = eval_window(spec, 12, x)
        for j in range(10, 15):
            assert float(w.p(j).to_float()[0]) == pytest.approx(float(ref[j]), rel=1e-12)


@pytest.mark.parametrize("norm", [ORTHONORMAL, MONIC, BALANCED])
def test_q_family_window_is_consistent(norm):
    spec = build_family("stieltjes-wigert", {"q": 0.5}, norm)
    w = eval_window(spec, 12, np.array([-3.0, 0.5, 7.0]))
    assert np.all(np.isfinite(w.values.m))
    assert np.max(w.residuals()) <= 1e-12


def test_q_family_window_beyond_double_range():
    spec = build_family("stieltjes-wigert", {"q": 0.5}, MONIC)
    w = eval_window(spec, 40, np.array([-3.0, 0.5, 7.0]))
    assert np.max(np.abs(w.values.e)) > 1024
    assert np.all(np.isfinite(w.values.m))
    assert np.max(w.residuals()) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.2, 4.0), st.integers(2, 60), st.floats(-50, 50))
def test_window_triples_satisfy_recurrence(q, alpha, k, x):
    spec = build_family("al-salam-carlitz", {"q": q, "alpha": alpha}, MONIC)
    assert np.max(eval_window(spec, k, x).residuals()) <= 1e-12


# ---------------------------------------------------------------- exact coefficients

def test_poly_coefficients_small_cases(hermite_monic, chebyshev):
    np.testing.assert_allclose(poly_coeffs_exact(hermite_monic, 3), [1, 0, -3, 0], atol=1e-14)
    np.testing.assert_allclose(poly_coeffs_exact(renorm(chebyshev, ORTHONORMAL), 2), [1, 0, -1], atol=1e-15)
    with pytest.raises(DomainError):
        poly_coeffs_exact(hermite_monic, 31)


def renorm(spec, norm):
    return spec.with_normalization(norm)


def test_leading_coefficient_is_product_of_c_over_a():
    spec = build_family("meixner-pollaczek", {"lambda": 0.7, "phi": 2.0}, BALANCED)
    a, _, c = spec.coefficients(10)
    coef = poly_coeffs_exact(spec, 10)
    assert coef[0] == pytest.approx(np.prod(c[1:11] / a[1:11]), rel=1e-13)
    assert poly_coeffs_exact(spec.with_normalization(MONIC), 10)[0] == pytest.approx(1.0, rel=1e-14)


def test_poly_coefficients_match_symbolic_recurrence():
    spec = build_family("power-law", {"r": 1.5, "s": 1, "gamma": 0.5}, ORTHONORMAL)
    a, b, _ = spec.coefficients(8)
    x = sp.symbols("x")
    prev, cur = sp.Integer(0), sp.Integer(1)
    for j in range(1, 9):
        prev, cur = cur, sp.expand(((x - sp.Float(b[j - 1], 30)) * cur - sp.Float(a[j - 1], 30) * prev) / sp.Float(a[j], 30))
    want = [float(v) for v in sp.Poly(cur, x).all_coeffs()]
    np.testing.assert_allclose(poly_coeffs_exact(spec, 8), want, rtol=1e-12, atol=1e-12 * max(map(abs, want)))


# ---------------------------------------------------------------- operators

def test_t4_of_monic_hermite_degree_two_is_constant(hermite_monic):
    grid = turan_grid(hermite_monic, "T4", 2, np.linspace(-5, 5, 11))
    np.testing.assert_allclose(grid.as_float(), 6.0, rtol=1e-13)


def test_s2_of_first_orthonormal_polynomial_is_one(mp_half_pi):
    for spec in (mp_half_pi, build_family("hermite")):
        np.testing.assert_allclose(turan_grid(spec, "S2", 1, np.linspace(-3, 3, 13)).as_float(), 1.0, rtol=1e-14)


def test_t2_by_hand(hermite_monic):
    v = turan(hermite_monic, "T2", 1, 0.0)
    assert v.sign == 1 and v.value.mantissa == 1.0 and v.value.exponent == 0
    assert v.to_dict()["value"] == {"sign": 1, "mantissa": 1.0, "exponent2": 0}


def test_order_requirements(hermite_monic):
    with pytest.raises(DomainError):
        turan(hermite_monic, "T4", 1, 0.0)
    with pytest.raises(SingularityError):
        turan(build_family("hermite-like", {"c": 1, "r": 0}), "S4", 3, 0.5)


def test_sign_field_agrees_with_value():
    spec = build_family("meixner-pollaczek", {"lambda": 1, "phi": 1.0})
    grid = turan_grid(spec, "S4", 6, np.linspace(-10, 10, 201))
    nz = grid.sign != 0
    np.testing.assert_array_equal(grid.sign[nz], np.sign(grid.values.m[nz]))


# ---------------------------------------------------------------- xi-weighted

def test_xi_optimal_examples(hermite_monic, chebyshev):
    assert xi_optimal(chebyshev, 3, -math.sqrt(3), math.sqrt(3)).xi == pytest.approx(4 / 7)
    assert xi_optimal(chebyshev, 3, -1.0, 0.0).xi == 1.0
    xkk = math.sqrt(3 + math.sqrt(6))
    choice = xi_optimal(hermite_monic, 4, -xkk, xkk)
    assert choice.xi == pytest.approx(16 / (16 + 3 + math.sqrt(6)), rel=1e-14)
    assert choice.unit_allowed and choice.valid_at(xkk)
    low = xi_optimal(hermite_monic, 4, -xkk, xkk, side="lower-tail")
    assert low.xi == pytest.approx(choice.xi) and low.valid_at(-xkk)
    with pytest.raises(DomainError):
        xi_optimal(hermite_monic, 4, 1.0, -1.0)


def test_xi_weighted_degenerate_cases(hermite_monic):
    x = np.linspace(-4, 4, 41)
    w = eval_window(hermite_monic, 3, x)
    np.testing.assert_allclose(turan_xi(hermite_monic, 3, x, 0.0).as_float(), (w.p(3) * w.p(3)).to_float(), rtol=1e-15)
    np.testing.assert_allclose(
        turan_xi(hermite_monic, 3, x, 1.0).as_float(), turan_grid(hermite_monic, "T2", 3, x).as_float(), rtol=1e-15
    )


def test_xi_weighted_positive_right_of_largest_zero(hermite_monic):
    xkk = 1.0  # He_2 zeros are -1, 1
    choice = xi_optimal(hermite_monic, 2, -xkk, xkk)
    assert turan_xi(hermite_monic, 2, xkk + 0.5, choice.xi).sign == 1


# ---------------------------------------------------------------- fourth-order coefficients

def test_general_s4_coefficients_on_linear_diagonal():
    spec = build_family("power-law", {"r": 1, "s": 1, "gamma": 1}, MONIC)
    a, b, c = spec.coefficients(5)
    mu, nu = s4_general_coeffs(spec, 2)
    assert mu == pytest.approx(a[3] * c[2] * 4 / (a[2] * c[3] * 3), rel=1e-15)
    herm = build_family("hermite")
    a, _, c = herm.coefficients(6)
    den = a[4] ** 2 - a[1] ** 2
    assert s4_general_coeffs(herm, 3)[0] == pytest.approx(a[4] * (a[4] ** 2 + a[3] ** 2 - a[2] ** 2 - a[1] ** 2) / (a[3] * den))
    with pytest.raises(SingularityError):
        s4_general_coeffs(build_family("power-law", {"r": 1, "s": 0, "gamma": 2}), 3)


@pytest.mark.parametrize("k", [2, 5, 9, 12])
def test_s2_and_s4_minimize_degree(k):
    spec = build_family("meixner-pollaczek", {"lambda": 1.3, "phi": "pi/2"}, ORTHONORMAL)
    a, b, c = spec.coefficients(k + 3)
    pol = {j: poly_coeffs_exact(spec, j) for j in range(k - 2, k + 3)}

    def pad(p, n):
        return np.concatenate([np.zeros(n - len(p)), p])

    n = 2 * k + 1
    sq = pad(np.convolve(pol[k], pol[k]), n)
    mid = pad(np.convolve(pol[k - 1], pol[k + 1]), n)
    out = pad(np.convolve(pol[k - 2], pol[k + 2]), n)
    xi = (c[k] / c[k + 1]) * (a[k + 1] / a[k])
    assert abs(sq[0] - xi * mid[0]) <= 1e-10 * abs(sq[0])
    mu, nu = s4_general_coeffs(spec, k)
    s4 = sq - mu * mid + nu * out
    # cancellation measured against the largest term entering each coefficient
    scale = np.maximum.reduce([np.abs(sq), np.abs(mu * mid), np.abs(nu * out)])
    assert np.all(np.abs(s4[:4]) <= 1e-10 * scale[:4])
    assert abs(s4[4]) > 1e-6 * scale[4]  # degree 2k - 4 survives


# ---------------------------------------------------------------- invariants

@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(["T2", "T4", "S2", "S4"]),
    st.floats(-40, 40),
    st.floats(-40, 40),
    st.floats(-6, 6),
    st.integers(3, 20),
)
def test_sign_survives_geometric_rescaling(op, ls, ll, x, k):
    spec = build_family("meixner-pollaczek", {"lambda": 0.8, "phi": 0.9}, ORTHONORMAL)
    ref = turan(spec, op, k, x)
    w = eval_window(spec, k, x)
    s, lam = 2.0**ls, 2.0**ll
    p = {j: w.p(j) * (s * lam**j) for j in range(k - 2, k + 3)}
    coefs = ref.coefficients
    if op == "T2":
        v = p[k] * p[k] - p[k - 1] * p[k + 1]
    elif op == "T4":
        v = 3.0 * (p[k] * p[k]) - 4.0 * (p[k - 1] * p[k + 1]) + p[k - 2] * p[k + 2]
    elif op == "S2":
        v = p[k] * p[k] - coefs["xi"] * (p[k - 1] * p[k + 1])
    else:
        v = p[k] * p[k] - coefs["mu"] * (p[k - 1] * p[k + 1]) + coefs["nu"] * (p[k - 2] * p[k + 2])
    if ref.sign != 0:
        assert int(v.sign()[0]) == ref.sign


@pytest.mark.parametrize("op", ["S2", "S4"])
def test_s_operators_scale_with_squared_degree_factor(op):
    base = build_family("al-salam-carlitz", {"q": 0.7, "alpha": 1.2}, ORTHONORMAL)
    x = np.linspace(-2, 6, 37)
    k = 7
    ref = turan_grid(base, op, k, x)
    for norm in (MONIC, BALANCED):
        other = base.with_normalization(norm)
        d = normalization_factors(base, other, k + 2)[k]
        got = turan_grid(other, op, k, x)
        nz = ref.sign != 0
        np.testing.assert_array_equal(got.sign[nz], ref.sign[nz])
        ratio = (got.values / ref.values).to_float()[nz]
        np.testing.assert_allclose(ratio, d * d, rtol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.2, 5.0), min_size=12, max_size=12), st.lists(st.floats(-3, 3), min_size=12, max_size=12), st.integers(1, 9))
def test_s2_nonnegative_in_the_band(a_tail, b, k):
    spec = custom_family([0.0] + a_tail, [0.0] + b, normalization=ORTHONORMAL)
    a, bb, _ = spec.coefficients(k + 2)
    x = np.linspace(bb[k] - 2 * a[k], bb[k] + 2 * a[k], 101)
    grid = turan_grid(spec, "S2", k, x)
    v = grid.values.to_float()
    assert np.all(v >= -1e-12 * grid.scale.to_float())


# ---------------------------------------------------------------- K-quadratics

def test_k_forms_fixture():
    a = [0, 1, 2, 3, 4]
    b = [0, 2, 4, 6]
    kp = kform_coefficients(a, b, 2)
    np.testing.assert_allclose(kp.K2, [-3, 18, 12], atol=1e-12)
    np.testing.assert_allclose(kp.K1, [1, -12, 33, 22], atol=1e-12)
    np.testing.assert_allclose(kp.K0, [-3, 24, 12], atol=1e-12)
    np.testing.assert_allclose(kp.G(), [-1, 24, -174, 244, 879, 564, 92], atol=1e-9)


def test_symmetric_k1_is_odd(mp_half_pi):
    qf = quadratic_forms(mp_half_pi, 4, np.array([0.0, 1.3, -1.3]))
    assert qf.K1[0] == 0.0
    assert qf.K1[1] == pytest.approx(-qf.K1[2])
    assert np.all(qf.f_defined == (qf.K2 != 0))


def test_k_forms_match_symbolic_elimination():
    rng = np.random.default_rng(4)
    a = np.concatenate([[0.0], np.cumsum(rng.uniform(0.3, 1.0, 6))])
    b = np.cumsum(rng.uniform(0.0, 1.0, 7))
    k = 3
    x, t = sp.symbols("x t")
    A = [sp.Rational(float(v)) for v in a]
    B = [sp.Rational(float(v)) for v in b]
    # orthonormal recurrence with p_{k+1} = 1, p_k = t
    pk1, pk = sp.Integer(1), t
    pk2 = ((x - B[k + 1]) * pk1 - A[k + 1] * pk) / A[k + 2]
    pkm1 = ((x - B[k]) * pk - A[k + 1] * pk1) / A[k]
    pkm2 = ((x - B[k - 1]) * pkm1 - A[k] * pk) / A[k - 1]
    form = sp.expand(A[k - 1] * A[k] * A[k + 2] * (3 * pk**2 - 4 * pkm1 * pk1 + pkm2 * pk2))
    poly = sp.Poly(form, t)
    kp = kform_coefficients(a, b, k)
    for deg, ours in ((2, kp.K2), (1, kp.K1), (0, kp.K0)):
        want = [float(v) for v in sp.Poly(poly.coeff_monomial(t**deg), x).all_coeffs()]
        np.testing.assert_allclose(ours, want, rtol=1e-12, atol=1e-12)


def test_k_form_reproduces_fourth_order_operator(mp_half_pi):
    assert kform_residual(mp_half_pi, 5, 3.0)[0] <= 1e-10
    spec = build_family("power-law", {"r": 2, "s": 1, "gamma": 1})
    assert np.max(kform_residual(spec, 8, np.linspace(-20, 200, 50))) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 40), st.floats(0, 1.4), st.floats(0, 2))
def test_g_is_discriminant_of_k_forms(k, s, gamma):
    spec = build_family("power-law", {"r": 1.5, "s": s, "gamma": gamma})
    a, b, _ = spec.coefficients(k + 2)
    kp = kform_coefficients(a, b, k)
    G = kp.G()
    for x in np.random.default_rng(k).uniform(-50, 50, 20):
        k2, k1, k0 = (np.polyval(p, x) for p in (kp.K2, kp.K1, kp.K0))
        direct = 4 * k0 * k2 - k1 * k1
        scale = abs(4 * k0 * k2) + k1 * k1
        assert abs(np.polyval(G, x) - direct) <= 1e-10 * scale
