import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.special import erfcx, gamma

from fhalanay import DomainError, MLQuery, ml, ml_decay, ml_deriv

# High-precision power series in mpmath (working precision grown with |x|),
# evaluated once offline and frozen here.
MP_SERIES = [
    (0.6, 1, -1.0, 0.4133273409431063),
    (0.6, 1, -3.0, 0.1597034802650912),
    (0.6, 1, -10.0, 0.04658965442680428),
    (0.6, 1, -50.0, 0.009083744773103454),
    (0.6, 0.6, -2.5, 0.044189420477497826),
    (0.6, 0.6, -20.0, 0.0006997653179785391),
    (0.3, 1, -5.0, 0.13708086902027064),
    (0.3, 1, -100.0, 0.007658856222286642),
    (0.9, 1, -7.0, 0.020553253921495637),
    (0.9, 1, -40.0, 0.0027434496977920995),
    (0.5, 1.5, -4.0, 0.21575013559373465),
    (0.75, 1.2, -12.0, 0.043955355019202294),
    (0.8, 0.8, -1000.0, 1.7469360255448725e-07),
    (0.4, 1, -1000.0, 0.0006712869760409519),
    (0.6, 1, 2.0, 39.69280495850546),
    (0.6, 1, 10.0, 2.3989043205646454e20),
    (0.6, 1.3, 5.0, 1666431.821724202),
    (1.5, 1, -3.0, -0.17556537379997825),
    (1.7, 2, -10.0, -0.0014205257363860977),
    (0.6, 1, -0.3, 0.7321872550971049),
]


@pytest.mark.parametrize("alpha,beta,x,expected", MP_SERIES)
def test_matches_high_precision_series(alpha, beta, x, expected):
    assert ml(alpha, beta, x) == pytest.approx(expected, rel=1e-10)


def test_documented_examples():
    assert ml(0.7, 1, 0.0) == 1.0
    assert ml(1, 1, -1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert abs(ml(2, 1, -((math.pi / 2) ** 2))) <= 1e-10
    assert ml(0.5, 1, -1.0) == pytest.approx(0.42758357615580705, rel=1e-12)
    assert ml_decay(0.6, 1.0, 0.0) == 1.0
    assert ml_decay(1.0, 2.0, 1.0) == pytest.approx(math.exp(-2.0), rel=1e-15)
    assert 0.0 < ml_decay(0.6, 1.0, 1.0) < 1.0
    assert ml_deriv(1.0, -1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert ml_deriv(0.6, 0.0) == pytest.approx(1.0 / gamma(1.6), rel=1e-14)
    assert ml_deriv(0.5, 0.0) == pytest.approx(1.0 / gamma(1.5), rel=1e-14)


def test_closed_form_exponential():
    x = np.linspace(-50.0, 20.0, 2001)
    np.testing.assert_allclose(ml(1.0, 1.0, x), np.exp(x), rtol=1e-10, atol=0)


def test_closed_form_cosine():
    x = np.linspace(0.0, 20.0, 2001)
    assert np.max(np.abs(ml(2.0, 1.0, -(x**2)) - np.cos(x))) <= 1e-9


def test_closed_form_erfcx():
    x = np.linspace(0.0, 10.0, 2001)
    np.testing.assert_allclose(ml(0.5, 1.0, -x), erfcx(x), rtol=1e-9, atol=0)


def test_alpha_one_general_beta():
    # E_{1,2}(x) = (e^x - 1) / x
    x = np.array([-30.0, -5.0, -0.5, 0.7, 3.0])
    np.testing.assert_allclose(ml(1.0, 2.0, x), np.expm1(x) / x, rtol=1e-12)


def test_alpha_two_beta_two_is_sinc():
    # E_{2,2}(-x^2) = sin(x) / x
    x = np.array([0.5, 2.0, 7.5])
    np.testing.assert_allclose(ml(2.0, 2.0, -(x**2)), np.sin(x) / x, rtol=1e-10)


def test_asymptotic_leading_term():
    for alpha in (0.3, 0.6, 0.9):
        x = 1e5
        ratio = ml(alpha, 1.0, -x) * gamma(1.0 - alpha) * x
        assert abs(ratio - 1.0) < 0.01


def test_far_negative_argument_positive():
    for alpha in (0.2, 0.5, 0.95):
        v = ml(alpha, 1.0, -1e6)
        assert v > 0.0
        assert v * gamma(1.0 - alpha) * 1e6 == pytest.approx(1.0, rel=1e-3)


def test_shape_preserved():
    x = np.linspace(-5, 1, 12).reshape(3, 4)
    out = ml(0.6, 1.0, x)
    assert out.shape == (3, 4)
    assert isinstance(ml(0.6, 1.0, -1.0), float)
    np.testing.assert_allclose(out.ravel(), [ml(0.6, 1.0, v) for v in x.ravel()], rtol=1e-14)


@pytest.mark.parametrize("alpha,beta", [(0.0, 1.0), (-0.5, 1.0), (0.5, 0.0), (0.5, -1.0), (math.nan, 1.0)])
def test_domain_errors(alpha, beta):
    with pytest.raises(DomainError):
        ml(alpha, beta, -1.0)


def test_non_finite_argument():
    with pytest.raises(DomainError):
        ml(0.5, 1.0, math.inf)
    with pytest.raises(DomainError):
        MLQuery(0.5, 1.0, math.nan)


def test_overflow_for_large_positive_argument():
    with pytest.raises(OverflowError):
        ml(1.0, 1.0, 1000.0)
    with pytest.raises(OverflowError):
        ml(0.5, 1.0, 1e4)


def test_ml_query():
    q = MLQuery(0.5, 1, -1)
    assert q.alpha == 0.5 and q.beta == 1.0 and q.x == -1.0
    assert q.evaluate() == pytest.approx(erfcx(1.0), rel=1e-13)
    with pytest.raises(DomainError):
        MLQuery(0.0, 1.0, 1.0)


def test_decay_rejects_negative_inputs():
    with pytest.raises(DomainError):
        ml_decay(0.5, -1.0, 1.0)
    with pytest.raises(DomainError):
        ml_decay(0.5, 1.0, -1.0)
    with pytest.raises(DomainError):
        ml_decay(1.5, 1.0, 1.0)


UNDERFLOW_ARG = 700.0
alphas = st.floats(0.05, 1.0)
rates = st.floats(1e-3, 50.0)
times = st.floats(1e-3, 100.0)


@given(alphas, rates, st.floats(0.0, 100.0))
def test_decay_positive_and_at_most_one(alpha, lam, t):
    # beyond this exp(-x) underflows for alpha = 1
    assume(lam * t**alpha <= UNDERFLOW_ARG)
    v = ml_decay(alpha, lam, t)
    assert 0.0 < v <= 1.0


@given(alphas, rates, times, st.floats(1e-3, 50.0))
def test_decay_strictly_decreasing(alpha, lam, t, dt):
    assume(lam * (t + dt) ** alpha <= UNDERFLOW_ARG)
    assert ml_decay(alpha, lam, t) > ml_decay(alpha, lam, t + dt)


@given(st.floats(0.05, 0.999), st.floats(1e-2, 10.0), st.floats(1e-2, 20.0), st.floats(1e-2, 20.0))
def test_sub_additivity(alpha, lam, t, s):
    prod = ml_decay(alpha, lam, t) * ml_decay(alpha, lam, s)
    assert prod < ml_decay(alpha, lam, t + s)


@given(st.sampled_from([0.3, 0.6, 0.9]), st.floats(-20.0, 2.0))
def test_derivative_matches_central_difference(alpha, x):
    h = 1e-6
    fd = (ml(alpha, 1.0, x + h) - ml(alpha, 1.0, x - h)) / (2 * h)
    assert fd == pytest.approx(ml_deriv(alpha, x), rel=1e-5, abs=1e-12)


@given(st.floats(0.05, 1.0), st.floats(-1e4, 1.0))
def test_derivative_positive(alpha, x):
    assume(alpha < 0.99 or x >= -UNDERFLOW_ARG)
    assert ml_deriv(alpha, x) > 0.0


@given(st.floats(0.1, 0.95), st.floats(0.2, 1.0), st.floats(1.0, 200.0))
def test_beta_recurrence(alpha, beta, x):
    # E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z)
    lhs = ml(alpha, beta, -x)
    rhs = 1.0 / gamma(beta) - x * ml(alpha, alpha + beta, -x)
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)
