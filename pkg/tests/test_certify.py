import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from turankit.certify import (
    certify_gamma_lemma7,
    certify_S4_sym_thm9,
    certify_T2_thm5,
    certify_T4_sym_thm7,
    certify_T4_thm10,
    chain_sequence_test,
    chain_to_explicit_c,
    constant_chain_threshold,
    quad_margin,
    t2_chain_terms,
    thm10_coeffs,
)
from turankit.errors import DomainError, WrongHypothesisError
from turankit.evalkernel import turan_grid
from turankit.recurrence import (
    BALANCED,
    MONIC,
    ORTHONORMAL,
    build_family,
    custom_family,
    gamma_max,
    test_sequence_params,
    test_sequences,
)


# ---------------------------------------------------------------- chain sequences

def test_half_then_quarters_is_a_chain():
    v = chain_sequence_test([0.5, 0.25, 0.25, 0.25])
    assert v.is_chain and v.failure_index is None
    np.testing.assert_allclose(v.minimal_params, 0.5, rtol=1e-15)


def test_single_constant_threshold_is_one():
    assert constant_chain_threshold(1) == pytest.approx(1.0)
    assert chain_sequence_test([1.0]).is_chain
    assert not chain_sequence_test([1.0 + 1e-12]).is_chain


def test_constant_above_threshold_fails():
    assert constant_chain_threshold(100) == pytest.approx(0.25024, abs=1e-5)
    v = chain_sequence_test([0.26] * 100)
    assert not v.is_chain and 1 <= v.failure_index <= 100


def test_chain_input_errors():
    with pytest.raises(DomainError):
        chain_sequence_test([])
    v = chain_sequence_test([0.1, 0.0, 0.1])
    assert not v.is_chain and v.failure_index == 2
    assert chain_sequence_test([0.1, 0.0, 0.1], allow_zero=True).is_chain


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-6, 0.3), min_size=1, max_size=60))
def test_minimal_parameters_reproduce_the_sequence(g):
    v = chain_sequence_test(g)
    if v.is_chain:
        m = np.concatenate([[0.0], v.minimal_params])
        np.testing.assert_allclose((1 - m[:-1]) * m[1:], g, rtol=1e-12)
        assert np.all((m[1:] > 0) & (m[1:] <= 1))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-6, 0.3), min_size=1, max_size=60), st.data())
def test_smaller_sequences_stay_chains(g, data):
    assume(chain_sequence_test(g).is_chain)
    shrink = data.draw(st.lists(st.floats(0.01, 1.0), min_size=len(g), max_size=len(g)))
    assert chain_sequence_test(np.array(g) * np.array(shrink)).is_chain


def _threshold_by_bisection(n, iters=200):
    lo, hi = 0.25, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if chain_sequence_test([mid] * n).is_chain:
            lo = mid
        else:
            hi = mid
    return lo


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_constant_threshold_by_bisection(n):
    assert _threshold_by_bisection(n) == pytest.approx(constant_chain_threshold(n), abs=1e-9)


# ---------------------------------------------------------------- second-order certificates

@pytest.mark.parametrize("q", [0.3, 0.5, 0.8])
def test_stieltjes_wigert_first_margin_closed_form(q):
    rep = certify_T2_thm5(build_family("stieltjes-wigert", {"q": q}), 3, "balanced")
    got = rep.rows_for("first")[0].margin
    want = q**-7 * (1 - q * q) * (2 - q - 2 * q * q + 2 * q**3)
    assert got == pytest.approx(want, rel=1e-10)
    assert want > 0


def test_al_salam_carlitz_balanced_pass():
    rep = certify_T2_thm5(build_family("al-salam-carlitz", {"q": 0.5, "alpha": 1.0}), 40, "balanced")
    assert rep.passed
    assert rep.normalization == "balanced"


def test_meixner_pollaczek_explicit_orthonormal_pass():
    spec = build_family("meixner-pollaczek", {"lambda": 0.5, "phi": "pi/2"}, ORTHONORMAL)
    for k in (1, 10, 100):
        assert certify_T2_thm5(spec, k, "explicit-c").passed


def test_decreasing_a_fails_immediately():
    spec = custom_family([0, 2, 1, 3, 4, 5])
    for mode in ("balanced", "chain"):
        rep = certify_T2_thm5(spec, 3, mode)
        assert not rep.passed
        assert rep.first_failure.i == 1 and rep.first_failure.condition == "a_increasing"
    with pytest.raises(DomainError):
        certify_T2_thm5(spec, 3, "other")


def test_chain_terms_first_index_uses_a0_zero():
    a = [0, 1, 2, 3]
    b = [0, 1, 3, 4]
    u = t2_chain_terms(a, b, 2)
    assert u[0] == pytest.approx(1 / (4 * 3))
    assert u[1] == pytest.approx(4 * 4 / (4 * 5 * 3))


def _random_spec(data, n=14):
    steps = data.draw(st.lists(st.floats(0.05, 2.0), min_size=n, max_size=n))
    db = data.draw(st.lists(st.floats(-1.0, 1.0), min_size=n, max_size=n))
    a = np.concatenate([[0.0], np.cumsum(steps)])
    b = np.concatenate([[0.0], np.cumsum(db)])
    return a, b


@settings(max_examples=80, deadline=None)
@given(st.data(), st.integers(2, 10))
def test_chain_certificate_yields_an_explicit_normalization(data, k):
    a, b = _random_spec(data)
    spec = custom_family(a, b)
    chain = certify_T2_thm5(spec, k, "chain")
    u = t2_chain_terms(a, b, k)
    eta = 1e-9
    bumped = chain_sequence_test(u + eta)
    if chain.passed and bumped.is_chain and np.all(bumped.minimal_params < 1):
        built = chain_to_explicit_c(spec, k, bumped.minimal_params)
        assert certify_T2_thm5(built, k, "explicit-c").passed


@settings(max_examples=80, deadline=None)
@given(st.data(), st.integers(2, 10))
def test_explicit_normalization_implies_chain(data, k):
    a, b = _random_spec(data)
    logs = data.draw(st.lists(st.floats(-0.3, 0.3), min_size=a.size, max_size=a.size))
    c = np.exp(np.cumsum(logs))
    c[0] = c[1] = 1.0
    spec = custom_family(a, b, c=c)
    if certify_T2_thm5(spec, k, "explicit-c").passed and np.all(np.diff(a[: k + 2]) > 0):
        assert certify_T2_thm5(spec, k, "chain").passed


@settings(max_examples=40, deadline=None)
@given(st.data(), st.integers(1, 8))
def test_balanced_certificate_is_sound(data, k):
    a, b = _random_spec(data)
    spec = custom_family(a, b * 0.2, normalization=BALANCED)
    if not certify_T2_thm5(spec, k, "balanced").passed:
        return
    aa, bb, _ = spec.coefficients(k + 1)
    X = np.max(np.abs(bb)) + 2 * np.max(aa) + 2
    x = np.linspace(-X, X, 1001)
    for i in range(1, k + 1):
        assert np.all(turan_grid(spec, "T2", i, x).sign >= 0)


# ---------------------------------------------------------------- fourth-order certificates

@pytest.mark.parametrize("lam", [0.5, 1.0, 2.5])
def test_meixner_pollaczek_third_difference_vanishes(lam):
    spec = build_family("meixner-pollaczek", {"lambda": lam, "phi": "pi/2"}, MONIC)
    rep = certify_T4_sym_thm7(spec, 30)
    rows = rep.rows_for("third_difference")
    assert all(abs(r.margin) <= r.tolerance for r in rows)
    assert rep.passed


def test_square_law_third_difference_is_zero():
    spec = custom_family(np.arange(0, 20.0), normalization=MONIC)
    rep = certify_T4_sym_thm7(spec, 12)
    assert rep.passed
    assert all(abs(r.margin) <= r.tolerance for r in rep.rows_for("third_difference"))


def test_exponential_squares_fail():
    a = np.sqrt(2.0 ** np.arange(14))
    a[0] = 0
    rep = certify_T4_sym_thm7(custom_family(a, normalization=MONIC), 10)
    assert not rep.passed
    for r in rep.rows_for("third_difference")[1:]:
        assert r.margin == pytest.approx(-(2.0 ** (r.i - 1)), rel=1e-12)


def test_fourth_order_certificates_need_symmetry():
    spec = build_family("power-law", {"r": 1, "s": 1, "gamma": 1})
    with pytest.raises(WrongHypothesisError):
        certify_T4_sym_thm7(spec, 5)
    with pytest.raises(WrongHypothesisError):
        certify_S4_sym_thm9(spec, 5)


def test_s4_constant_a_fails_first_index():
    rep = certify_S4_sym_thm9(build_family("hermite-like", {"c": 1, "r": 0}), 5)
    assert not rep.passed and rep.first_failure.i == 1


def test_s4_meixner_pollaczek_direct_values():
    rep = certify_S4_sym_thm9(build_family("meixner-pollaczek", {"lambda": 1, "phi": "pi/2"}), 6)
    R = {r.i: r.margin for r in rep.rows_for("R")}
    assert R[3] == pytest.approx(11.25, rel=1e-12)
    assert R[4] == pytest.approx(31.5, rel=1e-12)
    assert all(v > 0 for v in R.values()) and rep.passed
    # the alternative closed form is reported next to the direct value, not enforced
    assert rep.rows_for("R")[0].quantities["closed_form_reported"] == pytest.approx(576)


def test_s4_linear_a_meets_simple_conditions():
    rep = certify_S4_sym_thm9(build_family("power-law", {"r": 1, "s": 0, "gamma": 0}), 20)
    assert rep.extra["lemma_conditions_hold"]
    assert rep.passed


def test_thm10_test_sequences():
    spec, params = test_sequences(1, 1, 1)
    assert params.gamma_ok
    assert certify_T4_thm10(spec, 50).passed
    bad, _ = test_sequences(1, 1, 3)
    rep = certify_T4_thm10(bad, 50)
    assert not rep.passed
    assert rep.first_failure.condition == "b_step"


def test_thm10_constant_b_reduces_to_a_terms():
    a = np.arange(0, 10.0)
    q = thm10_coeffs(a, np.full(10, 2.0), 4)
    assert q.B == 0.0
    assert q.C == pytest.approx((a[4] - a[3]) * (4 * a[6] - a[3]) - a[5] * (a[5] - a[2]))


@pytest.mark.parametrize(
    "p0,p1,p2,nonneg",
    [(1, 2, 1, True), (1, -2, 1, True), (1, -2.1, 1, False), (-1, 5, 1, False), (1, 5, -1, False), (0, 0, 0, True)],
)
def test_quadratic_margin_sign(p0, p1, p2, nonneg):
    m = quad_margin(p0, p1, p2, 1e-12)
    assert (m >= -1e-12) == nonneg


def test_gamma_lemma_examples():
    rep = certify_gamma_lemma7(test_sequence_params(1, 1, 1))
    assert rep.passed and rep.extra["min_margin"] == pytest.approx(0.0, abs=1e-12)
    assert rep.extra["min_margin_index"] == 1
    zero = certify_gamma_lemma7(test_sequence_params(2, 1, 0))
    assert zero.passed and zero.extra["min_margin"] > 0
    edge = certify_gamma_lemma7(test_sequence_params(2, 1, gamma_max(2, 1)))
    assert edge.passed and edge.extra["violations"] == 0


def test_report_json_shape():
    rep = certify_T2_thm5(build_family("hermite"), 4, "explicit-c")
    doc = json.loads(rep.to_json())
    assert {"theorem", "verdict", "normalization", "rows"} <= set(doc)
    assert {"i", "margin", "quantities"} <= set(doc["rows"][0])
    assert doc["verdict"] == ("pass" if rep.passed else "fail")
