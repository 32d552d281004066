import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasiwalk.numerics import (QuadratureError, QuadratureSpec, RandomStream, central_difference,
                                integrate, make_stream)


def test_gauss_legendre_x_squared():
    spec = QuadratureSpec("gauss_legendre", 8, (0.0, 1.0))
    assert abs(integrate(lambda x: x**2, spec) - 1 / 3) < 1e-14


def test_trapezoid_cos_squared_full_period():
    spec = QuadratureSpec("trapezoid_periodic", 64, (-math.pi, math.pi))
    assert abs(integrate(lambda k: np.cos(k) ** 2, spec) - math.pi) < 1e-13


@pytest.mark.parametrize("rule", ["gauss_legendre", "trapezoid_periodic"])
@pytest.mark.parametrize("interval", [(0.0, 1.0), (-3.0, 2.5), (10.0, 10.5)])
def test_constant_integrand(rule, interval):
    spec = QuadratureSpec(rule, 16, interval)
    assert integrate(lambda x: np.ones_like(x), spec) == pytest.approx(interval[1] - interval[0], abs=1e-13)


def test_scalar_only_integrand_is_accepted():
    spec = QuadratureSpec("gauss_legendre", 10, (0.0, 1.0))
    assert integrate(math.exp, spec) == pytest.approx(math.e - 1, abs=1e-14)


@given(deg=st.integers(0, 5), n=st.integers(3, 12),
       coeffs=st.lists(st.floats(-5, 5), min_size=6, max_size=6),
       a=st.floats(-3, 0), width=st.floats(0.1, 4))
def test_gauss_legendre_polynomial_exactness(deg, n, coeffs, a, width):
    # n nodes integrate degree <= 2n - 1 exactly; degrees 0..5 need n >= 3
    c = coeffs[:deg + 1]
    b = a + width
    p = np.polynomial.Polynomial(c)
    exact = p.integ()(b) - p.integ()(a)
    got = integrate(p, QuadratureSpec("gauss_legendre", n, (a, b)))
    assert got == pytest.approx(exact, abs=1e-11 * (1 + sum(abs(v) for v in c)) * (1 + width) ** 6)


@pytest.mark.parametrize("power", [4, 6, 8, 10])
def test_trapezoid_periodic_spectral_convergence(power):
    # exact value of the integral of cos^p over a period, from the binomial middle coefficient
    exact = 2 * math.pi * math.comb(power, power // 2) / 2**power
    f = lambda k: np.cos(k) ** power
    errs = [abs(integrate(f, QuadratureSpec("trapezoid_periodic", n, (-math.pi, math.pi))) - exact)
            for n in (power, 2 * power, 4 * power)]
    for e0, e1 in zip(errs, errs[1:]):
        assert e1 <= max(e0 / 10, 1e-14)


def test_nonfinite_integrand_names_node():
    spec = QuadratureSpec("gauss_legendre", 4, (-1.0, 1.0))
    with pytest.raises(QuadratureError, match="node 1"):
        with np.errstate(divide="ignore"):
            integrate(lambda x: 1.0 / (x - x[1]), spec)


@pytest.mark.parametrize("kwargs", [dict(rule="simpson"), dict(node_count=1), dict(interval=(1.0, 1.0))])
def test_bad_quadrature_spec(kwargs):
    with pytest.raises(ValueError):
        QuadratureSpec(**kwargs)


def test_central_difference_quadratic():
    assert abs(central_difference(lambda x: x * x, 1.0, 1e-4) - 2.0) < 1e-7


def test_central_difference_constant():
    assert central_difference(lambda x: 3.0, 0.7, 1e-3) == 0.0


def test_central_difference_exp():
    assert abs(central_difference(math.exp, 0.0, 1e-4) - 1.0) < 1e-8


def test_central_difference_default_step_and_zero_step():
    assert central_difference(math.sin, 2.0) == pytest.approx(math.cos(2.0), rel=1e-9)
    with pytest.raises(ValueError):
        central_difference(math.sin, 0.0, 0.0)


def test_stream_determinism():
    a = make_stream(12345, 3).uniform(1000)
    b = make_stream(12345, 3).uniform(1000)
    assert np.array_equal(a, b)
    s = make_stream(7)
    assert np.array_equal(s.substream(4).coins(50), s.substream(4).coins(50))


def test_streams_uncorrelated():
    a = make_stream(2024, 0).uniform(100_000)
    b = make_stream(2024, 1).uniform(100_000)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.02


def test_substreams_differ():
    s = make_stream(99)
    assert not np.array_equal(s.substream(0).uniform(10), s.substream(1).uniform(10))
    assert not np.array_equal(s.uniform(10), s.substream(0).uniform(10))


def test_fair_coin_mean():
    # 3 sigma for 1e6 fair coins is 0.0015
    assert abs(make_stream(5).coins(1_000_000).mean() - 0.5) < 0.002


def test_uniform_range():
    u = make_stream(1).uniform(10_000)
    assert u.min() >= 0.0 and u.max() < 1.0


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_stream_rejects_out_of_range_seed(seed):
    with pytest.raises(ValueError):
        RandomStream(seed)
