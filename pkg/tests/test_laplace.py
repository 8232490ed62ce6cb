import math

import numpy as np
import pytest
from scipy import integrate as sint
from scipy import special

from genorder import laplace as lp
from genorder.errors import DivergenceError
from genorder.fixtures import tagged

E = math.e


@pytest.mark.parametrize("s", [1e-6, 0.01, 1.0, 50.0])
def test_transform_of_constant_and_identity(s):
    assert lp.laplace_transform("1", s).value == pytest.approx(1.0, rel=1e-10)
    assert lp.laplace_transform("x", s).value == pytest.approx(1.0 / s, rel=1e-10)
    assert lp.laplace_transform("x^2", s).value == pytest.approx(2.0 / s ** 2, rel=1e-10)


@pytest.mark.parametrize("s", [1e-4, 0.01, 0.3, 2.0])
def test_log1p_against_exponential_integral(s):
    # s int_0^inf e^-sx log(1+x) dx = e^s E1(s)
    oracle = math.exp(s) * special.exp1(s)
    assert lp.laplace_transform("log(1+x)", s).value == pytest.approx(oracle, rel=1e-9)


def test_log1p_reference_value():
    assert lp.laplace_transform("log(1+x)", 0.01).value == pytest.approx(4.0785114, abs=1e-6)


def test_log_square_against_scipy_quadrature():
    s = 1e-3
    f = lambda x: s * math.exp(-s * x) * math.log1p(x) ** 2
    ref = sum(sint.quad(f, lo, hi, epsabs=0, epsrel=1e-12, limit=500)[0]
              for lo, hi in [(0, 1), (1, 100), (100, 1e4), (1e4, 1e5), (1e5, 1e6)])
    assert lp.laplace_transform("(log(1+x))^2", s).value == pytest.approx(ref, rel=1e-8)


def test_transform_of_large_values_stays_in_log_space():
    # U = exp(x^0.5): the integrand peaks near x = 1/(4 s^2), far beyond 30/s, and
    # the exponent has curvature -2 s^3 there, so by Laplace's method
    # log Uhat(s) = 1/(4s) + log(pi/s)/2 + O(s)
    s = 1e-4
    r = lp.laplace_transform("exp(x^0.5)", s)
    assert r.value == math.inf
    assert r.log_value == pytest.approx(1 / (4 * s) + 0.5 * math.log(math.pi / s), abs=1e-3)


def test_transform_of_moderate_stretched_exponential_against_scipy():
    s = 0.05
    f = lambda x: s * math.exp(-s * x + math.sqrt(x))
    ref = sum(sint.quad(f, lo, hi, epsabs=0, epsrel=1e-12, limit=500)[0]
              for lo, hi in [(0, 1), (1, 100), (100, 400), (400, 2000), (2000, 1e4)])
    assert lp.laplace_transform("exp(x^0.5)", s).value == pytest.approx(ref, rel=1e-9)


def test_lower_limit():
    # s int_1^inf e^-sx dx = e^-s
    assert lp.laplace_transform("1", 0.3, lower=1.0).value == pytest.approx(math.exp(-0.3), rel=1e-10)
    with pytest.raises(ValueError):
        lp.laplace_transform("1", 0.3, lower=-1.0)


@pytest.mark.parametrize("U, s", [("exp(x)", 0.5), ("exp(x^2)", 1.0), ("exp(x^2)", 100.0)])
def test_divergent_transforms(U, s):
    with pytest.raises(DivergenceError):
        lp.laplace_transform(U, s)


def test_split_point():
    assert lp.laplace_transform("1", 0.1).split_point == pytest.approx(300.0)


def test_nonpositive_s_rejected():
    with pytest.raises(ValueError):
        lp.laplace_transform("1", 0.0)


@pytest.mark.parametrize("U", ["x", "(log(1+x))^2", "exp(2*x^0.5)", "x^3*log(1+x)"])
def test_transform_is_nonincreasing_in_s_for_nondecreasing_U(U):
    s = np.geomspace(1e-6, 10, 15)
    v = np.array([lp.laplace_transform(U, si).log_value for si in s])
    assert np.all(np.diff(v) <= 1e-9 * np.maximum(1, np.abs(v[1:])))


# ---------------------------------------------------------------- Tauberian

def test_tauberian_log_square():
    v = lp.tauberian_order_check("(log(1+x))^2", "1/log(x)", E, 2.0)
    assert v.member
    assert v.order.rho == pytest.approx(2.0, abs=0.1)
    assert any("forward-only" in n for n in v.notes)
    assert not v.details["two_sided"]


def test_tauberian_two_sided_when_asserted():
    v = lp.tauberian_order_check("(log(1+x))^2", "1/log(x)", E, 2.0, assert_hypotheses=True)
    assert v.details["two_sided"]


def test_tauberian_regularly_varying_is_inconclusive():
    v = lp.tauberian_order_check("x", "1/log(x)", E, 1.0)
    assert v.member is None
    assert not v.order.converged


def test_tauberian_constant():
    v = lp.tauberian_order_check("1", "1/log(x)", E, 0.0)
    np.testing.assert_allclose(v.details["log_transform"], 0.0, atol=1e-10)
    assert v.order.rho == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("f", tagged("m0"), ids=lambda f: f.name)
def test_order_agreement_on_monotone_M0_fixtures(f):
    v = lp.tauberian_order_check(f.expr, f.norm_expr, f.anchor, f.rho)
    assert v.member, v.notes
