import math

import numpy as np
import pytest
from scipy import integrate as sint

from genorder.errors import DepthExceeded, TooFewPoints
from genorder.numerics import (DEFAULT_QUAD, Grid, QuadConfig, cumulative_integral,
                               extrapolate_limit, integrate_finite, integrate_to_infinity)


def _seq(fn, grid=Grid()):
    x = grid.points
    return list(zip(x, fn(x)))


# ---------------------------------------------------------------- configuration

def test_grid_points_and_validation():
    g = Grid(10.0, 2.0, 40)
    assert g.points[0] == 10.0 and g.points[-1] == pytest.approx(10.0 * 2 ** 39)
    for bad in ((0.0, 2.0, 40), (10.0, 1.0, 40), (10.0, 2.0, 7)):
        with pytest.raises(ValueError):
            Grid(*bad)


def test_quad_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadConfig(max_depth=5)


# ---------------------------------------------------------------- finite integrals

def test_integrate_finite_examples():
    assert integrate_finite(lambda t: 1 / t, 1.0, math.e) == pytest.approx(1.0, abs=1e-10)
    v = integrate_finite(lambda t: 1 / (t * np.log(t)), math.e, math.exp(3))
    assert v == pytest.approx(math.log(3), abs=1e-8)


def test_integrate_finite_endpoint_singularity():
    assert integrate_finite(lambda t: t ** -0.5, 0.0, 1.0) == pytest.approx(2.0, abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_integrate_finite_is_additive(seed):
    rng = np.random.default_rng(seed)
    c = rng.uniform(-2, 2, 3)
    f = lambda t: np.sin(c[0] * t) + c[1] * t ** 2 + np.exp(c[2] * t)
    a, b, d = np.sort(rng.uniform(-3, 3, 3))
    total = integrate_finite(f, a, d)
    parts = integrate_finite(f, a, b) + integrate_finite(f, b, d)
    assert abs(total - parts) <= 3 * DEFAULT_QUAD.abs_tol


def test_integrate_finite_against_scipy():
    f = lambda t: np.exp(-t) * np.cos(5 * t) / (1 + t)
    ref, _ = sint.quad(f, 0.0, 7.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert integrate_finite(f, 0.0, 7.0) == pytest.approx(ref, abs=1e-10)


def test_integrate_finite_depth_exceeded():
    f = lambda t: np.sin(1.0 / np.maximum(np.abs(t), 1e-300))
    with pytest.raises(DepthExceeded):
        integrate_finite(f, 0.0, 1.0, QuadConfig(abs_tol=1e-14, rel_tol=1e-14, max_depth=12))


# ---------------------------------------------------------------- improper integrals

def test_integrate_to_infinity_examples():
    assert integrate_to_infinity(lambda t: t ** -2.0, 1.0) == pytest.approx(1.0, abs=1e-8)
    v = integrate_to_infinity(lambda t: 1 / (t * np.log(t) ** 2), math.e)
    assert v == pytest.approx(1.0, abs=1e-6)


def test_harmonic_tail_diverges():
    assert integrate_to_infinity(lambda t: 1 / t, 1.0) == math.inf


@pytest.mark.parametrize("L, finite", [
    (lambda t: 1 / np.log(t), False),          # assumption A
    (lambda t: 0.5 * t ** 0.5, False),          # assumption B
    (lambda t: 2 * t ** -2.0, True),            # assumption C
    (lambda t: 0.5 * np.log(t) ** -0.5, False),
    (lambda t: np.log(t) ** -2.0, True),
])
def test_normalizer_tails_diverge_exactly_on_divergent_families(L, finite):
    v = integrate_to_infinity(lambda t: L(t) / t, math.e)
    assert math.isfinite(v) == finite


def test_slow_log_tail_is_accurate():
    # int_e^inf dt / (t (log t)^1.5) = 2
    v = integrate_to_infinity(lambda t: 1 / (t * np.log(t) ** 1.5), math.e)
    assert v == pytest.approx(2.0, rel=1e-6)


# ---------------------------------------------------------------- cumulative integral

def test_cumulative_integral_examples():
    g = Grid()
    x, H = cumulative_integral(lambda t: 1 / t, 1.0, g)
    np.testing.assert_allclose(H, np.log(x), atol=1e-9)
    x, H = cumulative_integral(lambda t: 0.5 * t ** -0.5, 1.0, g)
    np.testing.assert_allclose(H, np.sqrt(x) - 1, rtol=1e-9)
    x, H = cumulative_integral(lambda t: 1 / (t * np.log(t)), math.e, g)
    np.testing.assert_allclose(H, np.log(np.log(x)), rtol=1e-9)


def test_cumulative_integral_monotone():
    x, H = cumulative_integral(lambda t: (1 + np.sin(np.log(t))) / t, 1.0, Grid())
    assert np.all(np.diff(H) >= 0)


# ---------------------------------------------------------------- limits

def test_constant_sequence():
    est = extrapolate_limit(_seq(lambda x: np.full_like(x, 2.0)))
    assert est.value == 2.0 and est.converged and est.uncertainty == 0.0


def test_slow_algebraic_sequence():
    est = extrapolate_limit(_seq(lambda x: 3 / np.sqrt(np.log(x))))
    assert abs(est.value) <= 0.02
    assert est.method.startswith("fit")


def test_alternating_sequence_is_oscillatory():
    pts = [(10 * 2.0 ** k, 1 + (-1) ** k * 0.3) for k in range(40)]
    est = extrapolate_limit(pts)
    assert est.oscillatory and not est.converged
    assert (est.tail_min, est.tail_max) == pytest.approx((0.7, 1.3))


@pytest.mark.parametrize("q", [-0.9, -0.5, 0.3, 0.7, 0.9])
def test_geometric_convergence_is_exact(q):
    pts = [(10 * 2.0 ** k, 1.5 + 0.8 * q ** k) for k in range(40)]
    assert extrapolate_limit(pts).value == pytest.approx(1.5, abs=1e-8)


def test_logarithmic_convergence():
    est = extrapolate_limit(_seq(lambda x: 3 + 1 / np.log(x)))
    assert est.value == pytest.approx(3.0, abs=1e-8) and est.converged


def test_divergent_sequences_report_infinity():
    for fn in (lambda x: np.log(np.log(x)), lambda x: np.sqrt(x), lambda x: np.log(x) / np.log(np.log(x))):
        est = extrapolate_limit(_seq(fn))
        assert est.value == math.inf and not est.converged


def test_converged_value_lies_in_tail_bounds():
    est = extrapolate_limit(_seq(lambda x: 2 - 1 / np.log(x)))
    assert est.converged
    assert est.tail_min <= est.value <= est.tail_max


def test_too_few_points():
    with pytest.raises(TooFewPoints):
        extrapolate_limit([(1.0, 1.0)] * 7)
