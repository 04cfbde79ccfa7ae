import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mumimo_psk.specfun import (
    factorial,
    gamma_moment_ratio,
    hyp1f1,
    ln_factorial,
    ln_gamma,
    pochhammer,
)

from oracles import hyp1f1_series


@pytest.mark.parametrize(
    "x, expected",
    [(1.0, 0.0), (5.0, math.log(24.0)), (0.5, 0.5723649429247001)],
)
def test_ln_gamma_values(x, expected):
    assert ln_gamma(x) == pytest.approx(expected, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_ln_gamma_domain(x):
    with pytest.raises(ValueError):
        ln_gamma(x)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.5, 50.0))
def test_ln_gamma_recurrence(x):
    assert abs(ln_gamma(x + 1) - ln_gamma(x) - math.log(x)) <= 1e-10


@pytest.mark.parametrize("x", [0.5, 1.5, 2.5, 3.5, 7.5, 12.5])
def test_ln_gamma_half_integers_vs_mpmath(x):
    assert ln_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-12)


def test_factorials():
    assert factorial(0) == 1.0
    assert factorial(5) == 120.0
    assert ln_factorial(6) == pytest.approx(math.log(720.0))
    with pytest.raises(ValueError):
        factorial(-1)
    with pytest.raises(ValueError):
        ln_factorial(1.5)


@pytest.mark.parametrize("a, n, expected", [(3, 0, 1.0), (2, 3, 24.0), (0.5, 2, 0.75)])
def test_pochhammer(a, n, expected):
    assert pochhammer(a, n) == pytest.approx(expected)


def test_pochhammer_rejects_fractional_count():
    with pytest.raises(ValueError):
        pochhammer(1.0, 1.5)


def test_gamma_second_moment():
    for n in range(1, 8):
        assert gamma_moment_ratio(n) == pytest.approx(n * (n + 1), rel=1e-12)


def test_hyp1f1_examples():
    assert hyp1f1(2.3, 0.7, 0.0).value == 1.0
    assert hyp1f1(1, 1, 1).value == pytest.approx(math.e, rel=1e-14)
    assert hyp1f1(1, 2, 2).value == pytest.approx((math.e**2 - 1) / 2, rel=1e-14)


def test_hyp1f1_result_metadata():
    r = hyp1f1(1.5, 0.5, 3.0)
    assert r.converged and r.terms_used > 1


def test_hyp1f1_flags_term_cap():
    r = hyp1f1(1.0, 0.5, 50.0, max_terms=10)
    assert not r.converged
    assert r.terms_used == 11


def test_hyp1f1_rejects_pole():
    with pytest.raises(ValueError):
        hyp1f1(1.0, -2.0, 1.0)


def test_hyp1f1_alternating_series_accuracy():
    # cancellation-heavy region handled by the extended-precision path
    for a, b, z in [(0.5, 0.5, -20.0), (-3.5, 1.5, 20.0), (1.0, 1.5, -15.0)]:
        assert hyp1f1(a, b, z).value == pytest.approx(hyp1f1_series(a, b, z), rel=1e-10)


@settings(max_examples=150, deadline=None)
@given(a=st.floats(0.5, 5.0), b=st.sampled_from([0.5, 1.5]), z=st.floats(0.0, 20.0))
def test_kummer_transformation(a, b, z):
    lhs = hyp1f1(a, b, z).value
    rhs = math.exp(z) * hyp1f1(b - a, b, -z).value
    assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


@settings(max_examples=60, deadline=None)
@given(a=st.floats(0.1, 6.0), b=st.floats(0.1, 4.0), z=st.floats(0.01, 30.0))
def test_partial_sums_nondecreasing(a, b, z):
    previous = 0.0
    for cap in (1, 2, 5, 10, 20, 40):
        value = hyp1f1(a, b, z, max_terms=cap).value
        assert value >= previous
        previous = value


@settings(max_examples=80, deadline=None)
@given(a=st.floats(0.5, 4.0), b=st.sampled_from([0.5, 1.5]), z=st.floats(0.0, 60.0))
def test_hyp1f1_matches_high_precision_series(a, b, z):
    assert hyp1f1(a, b, z).value == pytest.approx(hyp1f1_series(a, b, z), rel=1e-10)
