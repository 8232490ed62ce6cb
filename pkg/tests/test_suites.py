import math

import pytest

from genorder import fixtures as fx
from genorder import suites as su
from genorder.expr import parse
from genorder.functions import NormalizerSpec


# ---------------------------------------------------------------- fixtures

def test_fixture_names_are_unique():
    names = [f.name for f in fx.FIXTURES]
    assert len(names) == len(set(names))


@pytest.mark.parametrize("fixture", fx.FIXTURES, ids=lambda f: f.name)
def test_fixture_expressions_parse(fixture):
    parse(fixture.expr)
    if fixture.norm_expr is not None:
        parse(fixture.norm_expr)
    d = fixture.as_dict()
    assert d["class"] == fixture.class_id and d["rho"] == fixture.rho


def test_fixture_lookup():
    assert fx.get("log-power").rho == 2.0
    with pytest.raises(KeyError):
        fx.get("missing")
    assert {f.name for f in fx.tagged("m0minus")} == {"exp-inv-log", "exp-inv-square"}


def test_fixture_without_order_has_bounds():
    f = fx.get("cos-log-exponent")
    assert f.rho is None and f.bounds == (1.0, 3.0)


# ---------------------------------------------------------------- suites

def test_eps_set():
    assert su.eps_set(2.0) == [0.5, 0.3]
    assert su.eps_set(-0.5) == [0.5, 0.15]


@pytest.mark.parametrize("name", sorted(su.SUITES))
def test_builtin_suite_passes(name):
    results = su.SUITES[name]()
    failed = [r.name for r in results if not r.passed]
    assert results and not failed


def test_suite_sizes():
    assert len(su.suite_algebra()) >= 20
    assert len(su.suite_karamata()) >= 20


def test_algebra_cases_are_seeded():
    assert su.algebra_cases(5, seed=3) == su.algebra_cases(5, seed=3)


def test_suite_on_user_input():
    inp = su.SuiteInput(expr="(log(x))^2", norm=NormalizerSpec.weighted("1/log(x)", math.e), rho=2.0)
    results = su.suite_characterization(inp)
    assert results and all(r.passed for r in results)


def test_failing_user_input_is_reported():
    results = su.suite_sn(su.SuiteInput(b="x"))
    assert len(results) == 1 and not results[0].passed
    d = results[0].as_dict()
    assert d["observed"]["b_over_x"] == pytest.approx(1.0)


def test_check_results_serialize():
    for r in su.suite_gamma():
        d = r.as_dict()
        assert set(d) == {"suite", "name", "passed", "expected", "observed"}
        for v in d.values():
            assert not (isinstance(v, float) and math.isnan(v))
