import math

import numpy as np
import pytest

from genorder import inverse as iv
from genorder.errors import HypothesisFailed, NotBracketed, NotIncreasing
from genorder.functions import PositiveFunction


def test_exponential_inverse():
    x = iv.numeric_inverse(iv.InverseFn("exp(2*x)", 0.0), math.exp(6))
    assert x == pytest.approx(3.0, abs=1e-10)


def test_square_inverse():
    assert iv.numeric_inverse(iv.InverseFn("x^2", 0.0), 49.0) == pytest.approx(7.0, abs=1e-12)


def test_round_trip_at_a_point():
    inv = iv.InverseFn("exp(x^1.5)", 1.0)
    assert iv.numeric_inverse(inv, math.exp(20 ** 1.5)) == pytest.approx(20.0, abs=1e-8)


def test_vectorised_round_trip():
    rng = np.random.default_rng(7)
    inv = iv.InverseFn("x^3*log(x)", 10.0)
    x = rng.uniform(10, 1e6, 100)
    y = x ** 3 * np.log(x)
    np.testing.assert_allclose(iv.numeric_inverse(inv, y), x, rtol=1e-12)


def test_log_target_beyond_float_range():
    # U = exp(x^2) at x = 1e6 is exp(1e12)
    x = iv.numeric_inverse(iv.InverseFn("exp(x^2)", 1.0), log_y=1e12)
    assert x == pytest.approx(1e6, rel=1e-14)


def test_target_below_domain_start():
    with pytest.raises(NotBracketed):
        iv.numeric_inverse(iv.InverseFn("exp(2*x)", 10.0), 5.0)


def test_non_monotone_function():
    with pytest.raises(NotIncreasing):
        iv.numeric_inverse(iv.InverseFn("x+3*sin(x)", 1.0), 50.0)


def test_exactly_one_target():
    with pytest.raises(TypeError):
        iv.numeric_inverse(iv.InverseFn("x", 1.0))


# ---------------------------------------------------------------- order transfer

def test_order_of_log_inverse():
    v = iv.inverse_order_check("exp(2*x)", "1", 2.0)
    assert v.member
    assert v.order.rho == pytest.approx(0.5, abs=0.05)
    assert v.details["assumption"].label == "A"


def test_inverse_function_matches_closed_form():
    # V(y) = log(y)/2 and L(y) = b(V)/V = 2/log y
    v = iv.inverse_order_check("exp(2*x)", "1", 2.0)
    y = v.details["y_grid"].points
    np.testing.assert_allclose(v.details["V"](y), np.log(y) / 2, rtol=1e-12)
    np.testing.assert_allclose(v.details["L"](y), 2 / np.log(y), rtol=1e-12)


def test_order_of_root_log_inverse():
    v = iv.inverse_order_check("exp(x^2)", "1/(2*x)", 1.0)
    assert v.member
    assert v.order.rho == pytest.approx(1.0, abs=0.05)


def test_misdeclared_rho():
    with pytest.raises(HypothesisFailed):
        iv.inverse_order_check("exp(2*x)", "1", 3.0)


@pytest.mark.parametrize("U, b", [("exp(2*x)", "1"), ("exp(x^2)", "1/(2*x)")])
def test_L_of_U_equals_b_over_x(U, b):
    v = iv.inverse_order_check(U, b, 2.0 if b == "1" else 1.0)
    x = np.linspace(10.0, 40.0, 25)
    Uf, bf = PositiveFunction(U), PositiveFunction(b)
    lhs = v.details["L"].log(log_x=Uf.log(x))
    np.testing.assert_allclose(lhs, bf.log(x) - np.log(x), atol=1e-8)


def test_derived_normalizer_tends_to_zero():
    v = iv.inverse_order_check("exp(2*x)", "1", 2.0)
    assert abs(v.details["assumption"].L_limit.value) <= 1e-3
