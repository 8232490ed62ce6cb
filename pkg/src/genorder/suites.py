"""Verification suites: batteries of checks run on the fixture catalogue or on one input.

Each suite returns a list of :class:`CheckResult`. A check passes when the
observed behaviour matches the expected one, which may be a failure (``b = x``
is expected not to be self-neglecting).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import fixtures as fx
from .classes import (DEFAULT_GRID, algebra_orders, characterize, composition_order,
                      decompose_representation, decompose_representation_tail, estimate_order)
from .errors import GenOrderError, HypothesisFailed, Inconclusive
from .functions import NormalizerKind, NormalizerSpec, PositiveFunction
from .inverse import InverseFn, inverse_order_check, numeric_inverse
from .karamata import (GAMMA, GAMMA_MINUS, analyze_W, gamma_integral_equivalence,
                       gamma_ratio_check, integrate_and_classify, is_self_neglecting,
                       verify_karamata_preservation)
from .laplace import laplace_transform, tauberian_order_check
from .numerics import Grid

KARAMATA_ALPHAS = (-3.0, -2.0, 0.0, 1.0, 2.5)
REPRESENTATION_TOL = 1e-2
GAMMA_TOL = 1e-2


@dataclass
class CheckResult:
    """One check of a suite; ``observed`` holds the numbers behind the verdict."""

    suite: str
    name: str
    passed: bool
    expected: str
    observed: Dict[str, object] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, object]:
        return {"suite": self.suite, "name": self.name, "passed": bool(self.passed),
                "expected": self.expected, "observed": self.observed}


@dataclass
class SuiteInput:
    """A single function to check instead of the fixtures.

    ``norm`` is the normalizer (weighted, tail or b kind as appropriate);
    ``b`` is used by the suites that need a self-neglecting function.
    """

    expr: Optional[str] = None
    norm: Optional[NormalizerSpec] = None
    b: Optional[str] = None
    rho: Optional[float] = None
    expr2: Optional[str] = None
    grid: Grid = DEFAULT_GRID


def _need(inp: SuiteInput, *names):
    missing = [n for n in names if getattr(inp, n) is None]
    if missing:
        raise ValueError(f"this suite needs {', '.join('--' + m.replace('_', '-') for m in missing)}")


def eps_set(rho: float) -> List[float]:
    """Default characterization tolerances ``0.5`` and ``0.1 (1 + |rho|)``."""
    return [0.5, round(0.1 * (1.0 + abs(rho)), 12)]


# ---------------------------------------------------------------- characterization


def _characterization_checks(name, expr, norm, rho, grid) -> List[CheckResult]:
    out = []
    for eps in eps_set(rho):
        try:
            v = characterize(expr, norm, rho, eps, grid)
            ok = v.characterization_passed and v.x_epsilon is not None
            obs = {"eps": eps, "passed": v.characterization_passed, "x_epsilon": v.x_epsilon,
                   "notes": v.notes}
        except Inconclusive as err:
            ok, obs = False, {"eps": eps, "error": str(err)}
        out.append(CheckResult("characterization", f"{name}: eps={eps:.4g}", ok,
                               "two-sided bound by V^(rho+-eps) and a finite x_eps", obs))
        shifted = rho + 2 * eps
        try:
            v = characterize(expr, norm, shifted, eps, grid)
            ok = not v.characterization_passed
            obs = {"eps": eps, "rho": shifted, "passed": v.characterization_passed}
        except Inconclusive as err:
            ok, obs = True, {"eps": eps, "rho": shifted, "inconclusive": str(err)}
        out.append(CheckResult("characterization", f"{name}: rho+2eps rejected (eps={eps:.4g})",
                               ok, "fails", obs))
    return out


def suite_characterization(inp: Optional[SuiteInput] = None) -> List[CheckResult]:
    if inp is not None:
        _need(inp, "expr", "norm")
        rho = inp.rho
        if rho is None:
            rho = estimate_order(inp.expr, inp.norm, inp.grid).rho
        return _characterization_checks(inp.expr, inp.expr, inp.norm, rho, inp.grid)
    out = []
    for f in fx.FIXTURES:
        if f.rho is None or f.class_id == "M0minus":
            continue
        est = estimate_order(f.expr, f.normalizer)
        if not est.converged:
            continue
        out.extend(_characterization_checks(f.name, f.expr, f.normalizer, est.rho, DEFAULT_GRID))
    return out


# ---------------------------------------------------------------- representation


def _representation_check(name, expr, norm: NormalizerSpec, grid, rho=None) -> CheckResult:
    est = estimate_order(expr, norm, grid)
    rho = est.rho if rho is None else rho
    if norm.kind is NormalizerKind.TAIL:
        rep = decompose_representation_tail(expr, norm.expr, norm.anchor, rho, grid)
    else:
        rep = decompose_representation(expr, norm.expr, norm.anchor, rho, grid)
    lim = rep.alpha_ratio_limit.value
    beta_err = abs(rep.beta[-1] - est.rho)
    ok = abs(lim) <= REPRESENTATION_TOL and beta_err <= REPRESENTATION_TOL
    return CheckResult("representation", name, ok,
                       "alpha/H -> 0 and beta(x_K) = rho within 1e-2",
                       {"alpha_ratio_limit": lim, "beta_last": float(rep.beta[-1]), "rho": est.rho})


def suite_representation(inp: Optional[SuiteInput] = None) -> List[CheckResult]:
    if inp is not None:
        _need(inp, "expr", "norm")
        return [_representation_check(inp.expr, inp.expr, inp.norm, inp.grid, inp.rho)]
    return [_representation_check(f.name, f.expr, f.normalizer, DEFAULT_GRID)
            for f in fx.FIXTURES if f.class_id in ("M0", "M0minus")]


# ---------------------------------------------------------------- Karamata


def suite_karamata(inp: Optional[SuiteInput] = None,
                   alphas: Sequence[float] = KARAMATA_ALPHAS) -> List[CheckResult]:
    if inp is not None:
        _need(inp, "expr", "norm")
        cases = [(inp.expr, inp.expr, inp.norm.expr, inp.norm.anchor, inp.rho, inp.grid)]
    else:
        cases = [(f.name, f.expr, f.norm_expr, f.anchor, f.rho, DEFAULT_GRID)
                 for f in fx.FIXTURES if f.class_id == "M0"]
        cases.append(("constant", "1", "1/log(x)", math.e, 0.0, DEFAULT_GRID))
    out = []
    for name, U, L, a, rho, grid in cases:
        for alpha in alphas:
            v = verify_karamata_preservation(U, L, a, alpha, grid, rho=rho)
            out.append(CheckResult("karamata", f"{name}: alpha={alpha:g}", bool(v.member),
                                   "transform keeps the order within 0.05",
                                   {"order": v.order.rho, "base_order": v.details["base_order"].rho}))
    return out


# ---------------------------------------------------------------- Tauberian


def suite_tauberian(inp: Optional[SuiteInput] = None) -> List[CheckResult]:
    if inp is not None:
        _need(inp, "expr", "norm", "rho")
        v = tauberian_order_check(inp.expr, inp.norm.expr, inp.norm.anchor, inp.rho, inp.grid)
        return [CheckResult("tauberian", inp.expr, v.member is True,
                            "order of Uhat(1/x) equals rho within 0.1",
                            {"order": v.order.rho, "member": v.member, "notes": v.notes})]
    out = []
    for U, rho in (("(log(1+x))^2", 2.0), ("1", 0.0)):
        v = tauberian_order_check(U, "1/log(x)", math.e, rho)
        out.append(CheckResult("tauberian", U, v.member is True,
                               "order of Uhat(1/x) equals rho within 0.1",
                               {"order": v.order.rho, "member": v.member}))
    v = tauberian_order_check("x", "1/log(x)", math.e, 1.0)
    out.append(CheckResult("tauberian", "x (regularly varying)", v.member is None,
                           "inconclusive", {"order": v.order.rho, "member": v.member}))
    s = np.geomspace(1e-6, 10.0, 15)
    vals = np.array([laplace_transform("(log(1+x))^2", si).value for si in s])
    out.append(CheckResult("tauberian", "Uhat nonincreasing in s", bool(np.all(np.diff(vals) <= 0)),
                           "nonincreasing", {"values": vals.tolist()}))
    return out


# ---------------------------------------------------------------- SN and Gamma


def suite_sn(inp: Optional[SuiteInput] = None) -> List[CheckResult]:
    if inp is not None:
        _need(inp, "b")
        cases = [(inp.b, None)]
    else:
        cases = [("1", True), ("x/log(x)", True), ("sqrt(x)", True), ("1/x", True), ("x", False)]
    out = []
    for b, expected in cases:
        v = is_self_neglecting(b, inp.grid if inp else DEFAULT_GRID)
        ok = v.passed if expected is None else v.passed == expected
        out.append(CheckResult("sn", f"b = {b}", ok,
                               "self-neglecting" if expected in (None, True) else "not self-neglecting",
                               {"passed": v.passed, "b_over_x": v.b_over_x.value if v.b_over_x else None,
                                "notes": v.notes}))
    return out


def _gamma_case(name, f, b, sign, expect, a, grid, integral=True) -> List[CheckResult]:
    v = gamma_ratio_check(f, b, sign, grid, tol=GAMMA_TOL)
    errs = v.errors()
    out = [CheckResult("gamma", f"{name}: ratios", v.passed == expect,
                       f"{'in' if expect else 'not in'} {sign}({b})",
                       {"passed": v.passed, "max_error": max(errs.values()),
                        "errors": {f"{k:g}": e for k, e in sorted(errs.items())}})]
    if expect and integral:
        est = gamma_integral_equivalence(f, b, a, grid, sign)
        out.append(CheckResult("gamma", f"{name}: integral equivalence",
                               abs(est.value - 1.0) <= GAMMA_TOL, "ratio -> 1 within 1e-2",
                               {"limit": est.value}))
    return out


def suite_gamma(inp: Optional[SuiteInput] = None) -> List[CheckResult]:
    if inp is not None:
        _need(inp, "expr", "b")
        f = PositiveFunction(inp.expr)
        x = inp.grid.points[-2:]
        sign = GAMMA if f.log(x)[1] > f.log(x)[0] else GAMMA_MINUS
        v = gamma_ratio_check(inp.expr, inp.b, sign, inp.grid, tol=GAMMA_TOL)
        return _gamma_case(inp.expr, inp.expr, inp.b, sign, True, 0.0, inp.grid, v.passed)
    g = DEFAULT_GRID
    return (_gamma_case("exp(x)", "exp(x)", "1", GAMMA, True, 0.0, g)
            + _gamma_case("exponential density", "0.5*exp(-0.5*x)", "2", GAMMA_MINUS, True, 0.0, g)
            + _gamma_case("normal density", "exp(-x^2/2)", "1/x", GAMMA_MINUS, True, 0.0, g)
            + _gamma_case("floor-power", "exp(floor(x)*log(x))", "1/log(x)", GAMMA, False, 1.0, g)
            + _gamma_case("sine-tail", "exp(-x-0.5*sin(x))", "1", GAMMA_MINUS, False, 0.0, g))


# ---------------------------------------------------------------- integrals


def _integral_case(name, U, norm, rho, grid) -> List[CheckResult]:
    out = []
    if norm.kind is NormalizerKind.WEIGHTED:
        w = analyze_W(norm.expr, grid)
        out.append(CheckResult("w-integrals", f"{name}: W regime", w.regime == "finite",
                               "W' has a finite limit",
                               {"regime": w.regime, "alpha": w.alpha,
                                "Wprime_limit": w.Wprime_limit.value}))
    try:
        v = integrate_and_classify(U, norm, rho, None, grid)
        ratio = v.details.get("ratio_limit")
        ok = bool(v.member) and (ratio is None or abs(ratio.value - 1.0) <= 1e-2)
        obs = {"order": v.order.rho, "predicted": v.details["predicted_order"],
               "ratio_limit": None if ratio is None else ratio.value}
    except GenOrderError as err:
        ok, obs = False, {"error": f"{type(err).__name__}: {err}"}
    out.append(CheckResult("w-integrals", f"{name}: integral order", ok,
                           "predicted order, and int U / (w U/(rho+alpha)) -> 1 within 1e-2", obs))
    return out


def suite_w_integrals(inp: Optional[SuiteInput] = None) -> List[CheckResult]:
    if inp is not None:
        _need(inp, "expr", "norm", "rho")
        return _integral_case(inp.expr, inp.expr, inp.norm, inp.rho, inp.grid)
    g = DEFAULT_GRID
    return (_integral_case("exp(2 sqrt x)", "exp(2*x^0.5)", NormalizerSpec.weighted("0.5*x^0.5", 0.0), 2.0, g)
            + _integral_case("exp(-x)", "exp(-x)", NormalizerSpec.sn("1", 0.0), -1.0, g)
            + _integral_case("exp(x)", "exp(x)", NormalizerSpec.sn("1", 0.0), 1.0, g)
            + _integral_case("normal density", "exp(-x^2/2)", NormalizerSpec.sn("1/x", 1.0), -1.0, g))


# ---------------------------------------------------------------- inverse


def _inverse_case(name, U, b, rho, grid, seed=0) -> List[CheckResult]:
    out = []
    try:
        v = inverse_order_check(U, b, rho, grid)
        out.append(CheckResult("inverse", f"{name}: order of the inverse", bool(v.member),
                               f"1/rho = {1 / rho:g} within 0.05", {"order": v.order.rho}))
    except HypothesisFailed as err:
        out.append(CheckResult("inverse", f"{name}: order of the inverse", False,
                               f"1/rho = {1 / rho:g} within 0.05", {"hypothesis_failed": str(err)}))
        return out
    inv = InverseFn(U, 0.0)
    xs = np.random.default_rng(seed).uniform(0.5, 50.0, 100)
    lu = inv.log_value(xs)
    back = numeric_inverse(inv, log_y=lu)
    err = float(np.max(np.abs(back - xs) / np.maximum(1.0, xs)))
    out.append(CheckResult("inverse", f"{name}: round trip", err <= 1e-8, "error <= 1e-8",
                           {"max_error": err}))
    L = v.details["L"]
    bf = PositiveFunction(b)
    x = np.linspace(grid.x0, 4 * grid.x0, 10)
    dev = float(np.max(np.abs(L.log(log_x=inv.log_value(x)) - (bf.log(x) - np.log(x)))))
    out.append(CheckResult("inverse", f"{name}: L(U(x)) = b(x)/x", dev <= 1e-8, "within 1e-8",
                           {"max_log_deviation": dev}))
    lim = v.details["assumption"].L_limit.value
    out.append(CheckResult("inverse", f"{name}: L -> 0", abs(lim) <= 1e-3, "0", {"L_limit": lim}))
    return out


def suite_inverse(inp: Optional[SuiteInput] = None) -> List[CheckResult]:
    if inp is not None:
        _need(inp, "expr", "b", "rho")
        return _inverse_case(inp.expr, inp.expr, inp.b, inp.rho, inp.grid)
    out = _inverse_case("exp(2x)", "exp(2*x)", "1", 2.0, DEFAULT_GRID)
    out += _inverse_case("exp(x^2)", "exp(x^2)", "1/(2*x)", 1.0, DEFAULT_GRID)
    try:
        inverse_order_check("exp(2*x)", "1", 3.0)
        ok, obs = False, {}
    except HypothesisFailed as err:
        ok, obs = True, {"hypothesis_failed": str(err)}
    out.append(CheckResult("inverse", "misdeclared rho", ok, "HypothesisFailed", obs))
    return out


# ---------------------------------------------------------------- algebra


ALGEBRA_FAMILIES = {
    "M0": (NormalizerSpec.weighted("1/log(x)", math.e),
           ["(log(x))^{r}", "(log(x))^{r}*exp(1/log(x))", "(log(x))^{r}*(2+1/log(x))"]),
    "M0plus": (NormalizerSpec.weighted("0.5*x^0.5", 1.0),
               ["exp({r}*x^0.5)", "exp({r}*x^0.5)*x^2", "exp({r}*x^0.5)*(3+sin(x))"]),
    "M1": (NormalizerSpec.sn("1", 0.0),
           ["exp({r}*x)", "exp({r}*x)*x^3", "exp({r}*x+cos(x))"]),
}


def algebra_cases(n: int = 24, seed: int = 0):
    """Random pairs ``(family, U, V)`` drawn from the closed-form families."""
    rng = np.random.default_rng(seed)
    names = sorted(ALGEBRA_FAMILIES)
    cases = []
    for i in range(n):
        fam = names[i % len(names)]
        forms = ALGEBRA_FAMILIES[fam][1]
        r1, r2 = np.round(rng.uniform(-3, 3, 2), 2)
        f1, f2 = rng.integers(len(forms), size=2)
        cases.append((fam, forms[f1].format(r=f"({r1:g})"), forms[f2].format(r=f"({r2:g})")))
    return cases


def suite_algebra(inp: Optional[SuiteInput] = None, n: int = 24, seed: int = 0) -> List[CheckResult]:
    out = []
    if inp is not None:
        _need(inp, "expr", "expr2", "norm")
        cases = [(None, inp.expr, inp.expr2)]
    else:
        cases = algebra_cases(n, seed)
    for fam, U, V in cases:
        norm = inp.norm if fam is None else ALGEBRA_FAMILIES[fam][0]
        r = algebra_orders(U, V, norm, inp.grid if inp else DEFAULT_GRID)
        out.append(CheckResult("algebra", f"{U} * {V}", r.product_ok and r.quotient_ok,
                               "orders add and subtract within 0.02",
                               {"product": r.order_product.rho, "expected_product": r.expected_product,
                                "quotient": r.order_quotient.rho,
                                "expected_quotient": r.expected_quotient}))
    if inp is None:
        r = algebra_orders("exp(x)", "exp(-3*x/2)", NormalizerSpec.sn("1", 0.0),
                           norm_V=NormalizerSpec.sn("2", 0.0))
        out.append(CheckResult("algebra", "M1 with b1/b2 -> 1/2", r.product_ok and r.quotient_ok,
                               "rho1 + c rho2", {"c": r.c, "product": r.order_product.rho,
                                                 "expected_product": r.expected_product}))
        o, beta = composition_order("(log(x))^2", "1/log(x)", "x^3", math.e)
        out.append(CheckResult("algebra", "composition (log x)^2 o x^3", abs(o.rho - 6.0) <= 0.02,
                               "order 6 under L o V", {"order": o.rho, "beta": beta.value}))
    return out


SUITES: Dict[str, Callable[..., List[CheckResult]]] = {
    "characterization": suite_characterization,
    "representation": suite_representation,
    "karamata": suite_karamata,
    "tauberian": suite_tauberian,
    "gamma": suite_gamma,
    "sn": suite_sn,
    "w-integrals": suite_w_integrals,
    "inverse": suite_inverse,
    "algebra": suite_algebra,
}
