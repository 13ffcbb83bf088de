import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from turankit.ddarith import DDArray
from turankit.scaled import ScaledArray, ScaledReal, scaled_max_abs, scaled_sum

finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False)
exps = st.integers(min_value=-5000, max_value=5000)


def mp_value(m, e):
    return mpmath.mpf(float(m)) * mpmath.mpf(2) ** int(e)


def test_mantissa_is_normalized():
    s = ScaledArray([3.0, -0.75, 0.0], [0, 10, 7])
    assert np.all((np.abs(s.m) >= 1) & (np.abs(s.m) < 2) | (s.m == 0))
    assert list(s.e) == [1, 9, 0]


def test_values_far_outside_double_range_stay_finite():
    big = ScaledArray(1.5, 5000)
    tiny = ScaledArray(1.25, -5000)
    prod = big * tiny
    assert prod.to_float() == pytest.approx(1.875)
    assert big.log2abs() == pytest.approx(5000 + math.log2(1.5))


def as_mp(r: ScaledReal):
    return mpmath.mpf(r.sign) * mpmath.mpf(r.mantissa) * mpmath.mpf(2) ** r.exponent


@settings(max_examples=200, deadline=None)
@given(finite, exps, finite, exps)
def test_add_and_mul_match_mpmath(m1, e1, m2, e2):
    mpmath.mp.prec = 200
    u, v = mp_value(m1, e1), mp_value(m2, e2)
    x, y = ScaledArray(m1, e1), ScaledArray(m2, e2)
    assert abs(as_mp((x * y).item()) - u * v) <= 4e-16 * abs(u * v)
    assert abs(as_mp((x + y).item()) - (u + v)) <= 4e-16 * (abs(u) + abs(v))


@settings(max_examples=100, deadline=None)
@given(finite, exps)
def test_scaled_real_invariants(m, e):
    r = ScaledArray(m, e).item()
    assert (r.sign == 0) == (r.mantissa == 0.0)
    if r.sign:
        assert 1.0 <= r.mantissa < 2.0


def test_scaled_real_rejects_bad_fields():
    with pytest.raises(ValueError):
        ScaledReal(1, 0.5, 0)
    with pytest.raises(ValueError):
        ScaledReal(0, 1.0, 0)
    assert ScaledReal.zero().to_dict() == {"sign": 0, "mantissa": 0.0, "exponent2": 0}


def test_numpy_scalar_operands_defer_to_scaled_array():
    s = ScaledArray([1.0, 2.0])
    out = np.float64(3.0) * s
    assert isinstance(out, ScaledArray)
    np.testing.assert_allclose(out.to_float(), [3.0, 6.0])


def test_sum_and_max_abs():
    terms = [ScaledArray([1.0, -4.0]), ScaledArray([-3.0, 1.0], 2)]
    np.testing.assert_allclose(scaled_sum(terms).to_float(), [-11.0, 0.0])
    np.testing.assert_allclose(scaled_max_abs(terms).to_float(), [12.0, 4.0])


@settings(max_examples=100, deadline=None)
@given(finite, finite, finite)
def test_double_double_tracks_high_precision(x, y, z):
    mpmath.mp.prec = 200
    X, Y, Z = DDArray(x), DDArray(y), DDArray(z)
    got = (X * Y - Z) * X + Y
    want = (mpmath.mpf(x) * y - z) * x + y
    scale = abs(mpmath.mpf(x) * y * x) + abs(mpmath.mpf(z) * x) + abs(y)
    val = mpmath.mpf(float(got.hi)) * mpmath.mpf(2) ** int(got.e) + mpmath.mpf(float(got.lo)) * mpmath.mpf(2) ** int(got.e)
    assert abs(val - want) <= 1e-29 * scale + 1e-300


@settings(max_examples=100, deadline=None)
@given(finite, st.floats(min_value=1e-6, max_value=1e6))
def test_double_double_division(x, y):
    mpmath.mp.prec = 200
    got = DDArray(x) / DDArray(y)
    val = mpmath.mpf(float(got.hi)) * mpmath.mpf(2) ** int(got.e) + mpmath.mpf(float(got.lo)) * mpmath.mpf(2) ** int(got.e)
    want = mpmath.mpf(x) / y
    assert abs(val - want) <= 1e-30 * abs(want) + 1e-300
