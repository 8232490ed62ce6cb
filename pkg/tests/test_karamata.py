import math

import numpy as np
import pytest
from scipy import special

from genorder import karamata as ka
from genorder.errors import AlphaMinusOne, DivergenceError
from genorder.fixtures import tagged
from genorder.functions import NormalizerSpec

E = math.e
ALPHAS = (-3.0, -2.0, 0.0, 1.0, 2.5)


# ---------------------------------------------------------------- transform

@pytest.mark.parametrize("x", [2.0, 10.0, 1e3])
def test_transform_of_constant(x):
    assert ka.karamata_transform("1", 0.0, 0.0, x) == pytest.approx(1.0, rel=1e-12)
    assert ka.karamata_transform("1", -2.0, 1.0, x) == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("x", [3.0, 50.0, 1e6])
def test_transform_of_log_square_against_antiderivative(x):
    lx = math.log(x)
    exact = (x * lx ** 2 - 2 * x * lx + 2 * x - 2) / x
    assert ka.karamata_transform("(log(x))^2", 0.0, 1.0, x) == pytest.approx(exact, rel=1e-9)


def test_tail_transform_against_closed_form():
    # int_x^inf t^-3 e^-t dt = x^-2 E_3(x), so the transform is E_3(x)
    x = 4.0
    exact = special.expn(3, x)
    assert ka.karamata_transform("exp(-x)", -3.0, 1.0, x) == pytest.approx(exact, rel=1e-9)


def test_alpha_minus_one_rejected():
    with pytest.raises(AlphaMinusOne):
        ka.karamata_transform("1", -1.0, 1.0, 10.0)
    with pytest.raises(AlphaMinusOne):
        ka.verify_karamata_preservation("(log(x))^2", "1/log(x)", E, -1.0)


def test_tail_transform_of_non_integrable_function():
    with pytest.raises(DivergenceError):
        ka.karamata_transform("x^2", -2.0, 1.0, 10.0)


def test_log_table_matches_pointwise_transform():
    from genorder.numerics import Grid
    g = Grid(10.0, 2.0, 12)
    table = ka.log_karamata_table("(log(x))^2", 1.0, 1.0, g)
    direct = [math.log(ka.karamata_transform("(log(x))^2", 1.0, 1.0, float(x))) for x in g.points]
    np.testing.assert_allclose(table, direct, rtol=1e-9)


# ---------------------------------------------------------------- preservation

_M0 = [(f.expr, f.norm_expr, f.anchor, f.rho) for f in tagged("m0")] + [("1", "1/log(x)", E, 0.0)]


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("U, L, a, rho", _M0, ids=[c[0] for c in _M0])
def test_preservation(U, L, a, rho, alpha):
    v = ka.verify_karamata_preservation(U, L, a, alpha, rho=rho)
    assert v.member, v.notes
    assert v.order.rho == pytest.approx(rho, abs=0.05)


# ---------------------------------------------------------------- SN and Gamma

@pytest.mark.parametrize("b", ["1", "7", "x/log(x)", "x^0.5", "log(x)", "1/x"])
def test_self_neglecting(b):
    assert ka.is_self_neglecting(b).passed


def test_identity_is_not_self_neglecting():
    v = ka.is_self_neglecting("x")
    assert not v.passed and v.b_over_x.value == pytest.approx(1.0)


def test_exponential_is_gamma_exactly():
    v = ka.gamma_ratio_check("exp(x)", "1", ka.GAMMA)
    assert v.passed
    for y, est in v.table.items():
        assert est.value == pytest.approx(math.exp(y), rel=1e-12)


def test_normal_density_is_gamma_minus():
    v = ka.gamma_ratio_check("exp(-x^2/2)", "1/x", ka.GAMMA_MINUS)
    assert v.passed
    assert max(v.errors().values()) <= 1e-2
    assert set(v.table) == set(ka.DEFAULT_Y_GRID)


def test_floor_power_is_not_gamma():
    assert not ka.gamma_ratio_check("exp(floor(x)*log(x))", "1/log(x)", ka.GAMMA).passed


def test_wrong_sign_fails():
    assert not ka.gamma_ratio_check("exp(-x)", "1", ka.GAMMA).passed


@pytest.mark.parametrize("f, b, a, sign", [("exp(x)", "1", 0.0, ka.GAMMA),
                                           ("exp(-x)", "1", 0.0, ka.GAMMA_MINUS),
                                           ("0.5*exp(-0.5*x)", "2", 0.0, ka.GAMMA_MINUS),
                                           ("exp(-x^2/2)", "1/x", 1.0, ka.GAMMA_MINUS)])
def test_integral_equivalence(f, b, a, sign):
    assert ka.gamma_integral_equivalence(f, b, a, sign=sign).value == pytest.approx(1.0, abs=1e-3)


def test_integral_equivalence_picks_sign_from_trend():
    assert ka.gamma_integral_equivalence("exp(-x)", "1").value == pytest.approx(1.0, abs=1e-3)


def test_scaled_tail_integral_against_mills_ratio():
    # x int_x^inf phi / phi(x) = x sqrt(pi/2) erfcx(x/sqrt(2))
    from genorder.functions import PositiveFunction
    from genorder.numerics import RELATIVE_QUAD
    f = PositiveFunction("exp(-x^2/2)")
    for x in (3.0, 40.0, 1e4, 1e9):
        mills = x * math.sqrt(math.pi / 2) * special.erfcx(x / math.sqrt(2))
        got = ka._scaled_integral(f, x, 1 / x, math.inf, RELATIVE_QUAD)
        assert got == pytest.approx(mills, rel=1e-8)


# ---------------------------------------------------------------- W analysis

def test_W_for_root_normalizer():
    w = ka.analyze_W("0.5*x^0.5")
    assert w.regime == "finite" and w.alpha == 0.0
    assert w.predicted_order(2.0) == 2.0


def test_W_for_constant_normalizer():
    w = ka.analyze_W("4")
    assert w.alpha == pytest.approx(0.25, abs=1e-9)


def test_W_for_log_normalizer_flags_beta():
    w = ka.analyze_W("log(x)")
    assert w.alpha == 0.0
    assert w.beta_limit.value == pytest.approx(1.0, abs=0.02)
    assert any("outside (0, 1)" in n for n in w.notes)


@pytest.mark.parametrize("f", tagged("m0plus"), ids=lambda f: f.name)
def test_V_is_rapidly_varying_under_B(f):
    assert ka.rapid_variation_check(f.norm_expr, f.anchor).value == math.inf


def test_integral_of_M0plus_member():
    v = ka.integrate_and_classify("exp(2*x^0.5)", NormalizerSpec.weighted("0.5*x^0.5", 1.0), 2.0)
    assert v.member
    assert v.order.rho == pytest.approx(2.0, abs=0.02)
    assert v.details["ratio_limit"].value == pytest.approx(1.0, abs=1e-2)


def test_integral_of_M0plus_member_against_quadrature():
    # int_1^x exp(2 sqrt t) dt = (sqrt t - 1/2) exp(2 sqrt t) |_1^x
    v = ka.integrate_and_classify("exp(2*x^0.5)", NormalizerSpec.weighted("0.5*x^0.5", 1.0), 2.0)
    x = v.order.table["x"][:8]
    exact = np.log((np.sqrt(x) - 0.5) * np.exp(2 * np.sqrt(x)) - 0.5 * math.e ** 2)
    np.testing.assert_allclose(v.details["log_integral"][:8], exact, rtol=1e-9)


@pytest.mark.parametrize("U, rho", [("exp(-x)", -1.0), ("exp(x)", 1.0)])
def test_integral_in_M1(U, rho):
    v = ka.integrate_and_classify(U, NormalizerSpec.sn("1", 0.0), rho)
    assert v.member and v.order.rho == pytest.approx(rho, abs=1e-3)
    assert v.details["ratio_limit"].value == pytest.approx(1.0, abs=1e-3)
