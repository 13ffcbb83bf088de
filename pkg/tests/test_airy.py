import numpy as np
import pytest
import scipy.special

from turankit.airy import airy_ai, airy_prediction, airy_validate, airy_zero
from turankit.errors import DomainError


def test_function_against_scipy():
    z = np.concatenate([np.linspace(-30, 6, 400), [6.5, 8.0, 12.0]])
    ref = scipy.special.airy(z)[0]
    got = airy_ai(z)
    np.testing.assert_allclose(got, ref, atol=1e-9, rtol=1e-6)
    assert airy_ai(0.0) == pytest.approx(0.355028053887817, rel=1e-14)


def test_zeros_against_scipy():
    ref = -scipy.special.ai_zeros(10)[0]
    got = [airy_zero(j) for j in range(1, 11)]
    np.testing.assert_allclose(got, ref, atol=1e-9)
    assert airy_zero(1) == pytest.approx(2.338107, abs=1e-6)
    assert np.all(np.diff(got) > 0)
    with pytest.raises(DomainError):
        airy_zero(0)


def test_prediction_below_leading_term():
    for k in (10, 100, 1000):
        assert airy_prediction(1.0, 0.5, k, 1) < 2 * k**0.5


def test_relative_error_decreases_for_hermite():
    errs = [airy_validate(1.0, 0.5, k).rel_error for k in (100, 400, 1600)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.02


def test_second_zero_tracks_second_airy_zero():
    p = airy_validate(1.0, 0.5, 400, j=2)
    assert p.rel_error < 0.02
    assert p.measured < airy_validate(1.0, 0.5, 400, j=1).measured


def test_input_domain():
    with pytest.raises(DomainError):
        airy_validate(1.0, 1.5, 100)
    with pytest.raises(DomainError):
        airy_validate(1.0, 0.5, 3, j=3)
