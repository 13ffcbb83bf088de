import numpy as np
import pytest

from turankit.errors import AnomalyError, DomainError
from turankit.gpoly import fujiwara_radius, g_poly_bound, real_roots
from turankit.recurrence import test_sequence_params
from turankit.spectra import extreme_zeros, thm2_bound, thm2_delta_cap
from turankit.recurrence import test_sequences


def test_fixture_sextic():
    g = g_poly_bound(test_sequence_params(1, 1, 2), 2)
    np.testing.assert_allclose(g.coefficients, [-1, 24, -174, 244, 879, 564, 92], atol=1e-9)
    assert g.roots.size == 2
    assert 6.4 <= g.largest_root <= 6.9
    assert g.roots[0] == pytest.approx(-0.26, abs=0.01)


def test_general_degree_constant_term():
    # 4(16 n^3 - 33 n^2 + 14 n - 1) at n = 2
    g = g_poly_bound(test_sequence_params(1, 1, 2), 2)
    assert g.coefficients[-1] == pytest.approx(4 * (16 * 8 - 33 * 4 + 14 * 2 - 1))


def test_roots_are_roots():
    for k in (2, 10, 100):
        g = g_poly_bound(test_sequence_params(1, 1, 1), k)
        assert np.all(g.residuals <= 1e-8)
        ref = np.sort(np.roots(g.coefficients)[np.abs(np.roots(g.coefficients).imag) < 1e-9].real)
        np.testing.assert_allclose(g.roots, ref, rtol=1e-8)


def test_fujiwara_radius_bounds_all_roots():
    rng = np.random.default_rng(0)
    for _ in range(50):
        c = rng.normal(size=7)
        assert np.max(np.abs(np.roots(c))) <= fujiwara_radius(c) * (1 + 1e-12)


def test_real_roots_simple_cases():
    np.testing.assert_allclose(real_roots(np.poly([-2.0, 0.5, 3.0])), [-2, 0.5, 3], atol=1e-10)
    assert real_roots(np.array([1.0, 0.0, 1.0])).size == 0


def test_no_real_roots_is_an_anomaly(monkeypatch):
    import turankit.gpoly as gp

    monkeypatch.setattr(gp, "real_roots", lambda coef, cells=0: np.array([]))
    with pytest.raises(AnomalyError):
        gp.g_poly_bound(test_sequence_params(1, 1, 1), 5)


def test_narrow_range_is_enforced():
    with pytest.raises(DomainError):
        g_poly_bound(test_sequence_params(1, 1.6, 0.1), 10)
    with pytest.raises(DomainError):
        g_poly_bound(test_sequence_params(1, 1, 1), 0)


def test_largest_root_bounds_the_largest_zero():
    spec, params = test_sequences(1, 1, 1)
    for k in (20, 100):
        assert extreme_zeros(spec, k).x_kk <= g_poly_bound(params, k).largest_root


def test_largest_root_falls_below_the_asymptotic_formula_for_large_degree():
    params = test_sequence_params(1, 1, 1)
    delta = 0.9 * thm2_delta_cap(params)
    k = 10_000
    assert g_poly_bound(params, k).largest_root < thm2_bound(params, k, delta)
