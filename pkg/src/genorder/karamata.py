"""Karamata integrals, self-neglecting and Gamma(b) functions, W-analysis.

Integrals of rapidly growing or decaying functions are formed in log space.
For the Gamma-type integrals the substitution ``t = x + z*w(x)`` with an
auxiliary function ``w`` (``b``, or ``W = x/L``) turns

    int_a^x U(t) dt = w(x) U(x) int_{(a-x)/w(x)}^0 exp(D(z)) dz,
    D(z) = log U(x + z w(x)) - log U(x),

into an integral of order one, whose limit is the quantity the classical
results are about.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import expr as ex
from .classes import (DEFAULT_GRID, ZERO_LIMIT, ClassVerdict, _grid_log, _pairs,
                      check_assumption, estimate_order_sn, estimate_order_weighted)
from .errors import AlphaMinusOne, DivergenceError, DomainError, NonPositive, SlowDivergence
from .functions import Normalizer, NormalizerKind, NormalizerSpec, PositiveFunction
from .numerics import (RELATIVE_QUAD, Grid, LimitEstimate, QuadConfig, extrapolate_limit,
                       integrate_finite, integrate_to_infinity)

DEFAULT_Y_GRID = (-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0)
GAMMA = "gamma"
GAMMA_MINUS = "gamma_minus"
SELF_NEGLECTING = "sn"
KARAMATA_TOL = 0.05


# ---------------------------------------------------------------- Karamata


def _log_integral(g, lo: float, hi: float, cfg: QuadConfig) -> float:
    """``log int_lo^hi exp(g(v)) dv`` with the exponent shifted by its endpoint maximum."""
    m = float(max(g(np.array([lo]))[0], g(np.array([hi]))[0]))
    if not math.isfinite(m):
        m = float(np.max(g(np.linspace(lo, hi, 17)[1:-1])))
    val = integrate_finite(lambda v: np.exp(g(v) - m), lo, hi, cfg)
    return m + math.log(val) if val > 0 else -math.inf


def log_karamata_table(U, alpha: float, a: float, grid: Grid = DEFAULT_GRID,
                       cfg: QuadConfig = RELATIVE_QUAD) -> np.ndarray:
    """``log`` of the Karamata transform at every grid point.

    For ``alpha > -1`` the transform is ``x**(-1-alpha) int_a^x t**alpha U(t) dt``,
    for ``alpha < -1`` it is ``x**(-1-alpha) int_x^inf t**alpha U(t) dt``.

    Raises
    ------
    AlphaMinusOne
        For ``alpha = -1``, where neither form applies.
    DivergenceError
        When the tail integral diverges.
    """
    if alpha == -1:
        raise AlphaMinusOne("the Karamata transform is undefined for alpha = -1")
    Uf = PositiveFunction.coerce(U)
    u = grid.log_points

    def g(v):  # log of t**alpha U(t) dt/du at t = e**v
        return (alpha + 1.0) * v + Uf.log(log_x=v)

    panels = np.array([_log_integral(g, lo, hi, cfg) for lo, hi in zip(u[:-1], u[1:])])
    if alpha > -1:
        x0 = float(grid.x0)
        if a > x0:
            raise ValueError("anchor must not exceed the first grid point")
        if a == x0:
            head = -math.inf
        else:
            ref = float(g(np.array([u[0]]))[0])

            def head_integrand(t):
                t = np.asarray(t, dtype=float)
                return np.exp(alpha * np.log(t) + Uf.log(t) - ref)

            val = integrate_finite(head_integrand, a, x0, cfg)
            head = ref + math.log(val) if val > 0 else -math.inf
        logI = np.logaddexp.accumulate(np.concatenate([[head], panels]))
    else:
        ref = float(g(np.array([u[-1]]))[0])
        tail = integrate_to_infinity(lambda v: np.exp(g(v) - ref), float(u[-1]), cfg)
        if not math.isfinite(tail):
            raise DivergenceError(f"t^{alpha} U(t) is not integrable at infinity")
        last = ref + math.log(tail)
        rev = np.logaddexp.accumulate(np.concatenate([[last], panels[::-1]]))
        logI = rev[::-1]
    return logI - (1.0 + alpha) * u


def karamata_transform(U, alpha: float, a: float, x: float, cfg: QuadConfig = RELATIVE_QUAD) -> float:
    """Karamata transform of U at a single abscissa ``x``.

    ``x**(-1-alpha) int_a^x t**alpha U(t) dt`` for ``alpha > -1`` and
    ``x**(-1-alpha) int_x^inf t**alpha U(t) dt`` for ``alpha < -1``.
    """
    if alpha == -1:
        raise AlphaMinusOne("the Karamata transform is undefined for alpha = -1")
    Uf = PositiveFunction.coerce(U)

    def integrand(t):
        t = np.asarray(t, dtype=float)
        return np.exp(alpha * np.log(t) + Uf.log(t))

    if alpha > -1:
        val = integrate_finite(integrand, a, x, cfg)
    else:
        val = integrate_to_infinity(integrand, x, cfg)
        if not math.isfinite(val):
            raise DivergenceError(f"t^{alpha} U(t) is not integrable at infinity")
    return val * x ** (-1.0 - alpha)


def verify_karamata_preservation(U, L, a: float, alpha: float, grid: Grid = DEFAULT_GRID, *,
                                 rho: Optional[float] = None,
                                 tol: float = KARAMATA_TOL) -> ClassVerdict:
    """Check that the Karamata transform of U has the same M0 order as U."""
    if alpha == -1:
        raise AlphaMinusOne("the Karamata transform is undefined for alpha = -1")
    verdict = check_assumption(L, a, grid)
    base = estimate_order_weighted(U, L, a, grid, assumption=verdict)
    target = base.rho if rho is None else rho
    x = grid.points
    table = PositiveFunction.from_table(x, log_karamata_table(U, alpha, a, grid),
                                        label=f"karamata[{alpha:g}]")
    est = estimate_order_weighted(table, L, a, grid, assumption=verdict)
    ok = math.isfinite(est.rho) and abs(est.rho - target) <= tol
    notes = [f"order of U {base.rho:.6g}, of the transform {est.rho:.6g} (alpha = {alpha:g})"]
    return ClassVerdict(ok, est, False, None, notes, {"base_order": base, "alpha": alpha})


# ---------------------------------------------------------------- SN and Gamma(b)


@dataclass
class GammaVerdict:
    """Per-y limits of ``f(x + y b(x)) / f(x)`` against the class target.

    ``table`` maps y to the extrapolated ratio (None when too few grid
    points stay inside the domain).
    """

    table: Dict[float, Optional[LimitEstimate]]
    target: str
    passed: bool
    b_over_x: Optional[LimitEstimate] = None
    notes: List[str] = field(default_factory=list)

    def errors(self) -> Dict[float, float]:
        """Relative deviation of each per-y ratio from its target."""
        out = {}
        for y, est in self.table.items():
            if est is None:
                out[y] = math.inf
            else:
                out[y] = abs(est.value / _target_value(self.target, y) - 1.0)
        return out


def _target_value(target: str, y: float) -> float:
    if target == GAMMA:
        return math.exp(y)
    if target == GAMMA_MINUS:
        return math.exp(-y)
    return 1.0


def _shifted_log_ratio(f: PositiveFunction, b: PositiveFunction, x: np.ndarray, y: float):
    """``log f(x + y b(x)) - log f(x)`` where defined, with a validity mask."""
    bx = np.exp(b.log(x))
    shift = y * bx
    valid = (x + shift) > 0
    out = np.full(x.shape, np.nan)
    idx = np.flatnonzero(valid)
    if len(idx):
        try:
            out[idx] = f.log_increment(x[idx], shift[idx])
        except DomainError:
            for i in idx:
                try:
                    out[i] = float(f.log_increment(x[i:i + 1], shift[i:i + 1])[0])
                except DomainError:
                    pass
    valid &= np.isfinite(out)
    return out, valid


def _ratio_limits(f, b, grid, y_grid, target, tol):
    x = grid.points
    table = {}
    passed = True
    notes = []
    for y in y_grid:
        logr, valid = _shifted_log_ratio(f, b, x, y)
        if valid.sum() < 8:
            table[float(y)] = None
            passed = False
            notes.append(f"y = {y:g}: fewer than 8 grid points in the domain")
            continue
        # the log ratio is extrapolated; its exponential is the ratio limit
        est = extrapolate_limit(_pairs(x[valid], logr[valid]))
        ratio = LimitEstimate(math.exp(min(est.value, 700.0)) if not est.diverges or est.value < 0
                              else math.inf,
                              est.uncertainty, est.converged, est.oscillatory,
                              math.exp(min(est.tail_min, 700.0)), math.exp(min(est.tail_max, 700.0)),
                              est.method)
        table[float(y)] = ratio
        err = abs(ratio.value / _target_value(target, y) - 1.0)
        if not err <= tol:
            passed = False
            notes.append(f"y = {y:g}: ratio -> {ratio.value:.6g}, target {_target_value(target, y):.6g}")
    return table, passed, notes


def is_self_neglecting(b, grid: Grid = DEFAULT_GRID, y_grid: Sequence[float] = DEFAULT_Y_GRID,
                       tol: float = 1e-2) -> GammaVerdict:
    """Check ``b(x)/x -> 0`` and ``b(x + y b(x)) / b(x) -> 1`` for y in ``y_grid``.

    Grid points where ``x + y b(x)`` leaves the domain of b are skipped.
    """
    bf = PositiveFunction.coerce(b)
    x = grid.points
    ratio = np.exp(_grid_log(bf, x) - np.log(x))
    b_over_x = extrapolate_limit(_pairs(x, ratio))
    table, passed, notes = _ratio_limits(bf, bf, grid, y_grid, SELF_NEGLECTING, tol)
    if b_over_x.diverges or abs(b_over_x.value) > ZERO_LIMIT:
        passed = False
        notes.insert(0, f"b(x)/x -> {b_over_x.value:.4g}, not 0")
    return GammaVerdict(table, SELF_NEGLECTING, passed, b_over_x, notes)


def gamma_ratio_check(f, b, sign: str = GAMMA, grid: Grid = DEFAULT_GRID,
                      y_grid: Sequence[float] = DEFAULT_Y_GRID, tol: float = 1e-2) -> GammaVerdict:
    """Check ``f(x + y b(x)) / f(x) -> e**y`` (Gamma) or ``e**-y`` (Gamma minus)."""
    if sign not in (GAMMA, GAMMA_MINUS):
        raise ValueError(f"sign must be {GAMMA!r} or {GAMMA_MINUS!r}")
    sn = is_self_neglecting(b, grid, y_grid, tol)
    table, passed, notes = _ratio_limits(PositiveFunction.coerce(f), PositiveFunction.coerce(b),
                                         grid, y_grid, sign, tol)
    if not sn.passed:
        passed = False
        notes.insert(0, "b is not self-neglecting on the grid")
    return GammaVerdict(table, sign, passed, sn.b_over_x, notes)


def _z_edges(lo: float, hi: float) -> List[float]:
    # 0, +-1, +-2, +-4, ... towards the far end of [lo, hi]
    if lo < 0 <= hi:
        edges = [0.0]
        z = -1.0
        while z > lo:
            edges.append(z)
            z *= 2.0
        edges.append(lo)
        return edges
    edges = [0.0]
    z = 1.0
    while z < hi:
        edges.append(z)
        z *= 2.0
    if math.isfinite(hi):
        edges.append(hi)
    return edges


def _scaled_integral(U: PositiveFunction, x: float, w: float, lower: float, cfg: QuadConfig,
                     max_panels: int = 400) -> float:
    """``int exp(log U(x + z w) - log U(x)) dz`` over ``[lower, 0]`` or ``[0, inf)``.

    ``lower = inf`` selects the tail range. Panels double in length and the
    sum stops once a panel adds less than ``1e-14`` of the total.
    """
    xa = np.array([x])

    def integrand(z):
        z = np.asarray(z, dtype=float)
        return np.exp(U.log_increment(np.broadcast_to(xa, z.shape), z * w))

    if math.isinf(lower):
        z, total, step = 0.0, 0.0, 1.0
        for _ in range(max_panels):
            p = integrate_finite(integrand, z, z + step, cfg)
            total += p
            if p <= 1e-14 * total and z >= 4:
                return total
            z += step
            step *= 2.0 if z >= 1 else 1.0
            if z + step > 1e300:
                break
        raise DivergenceError(f"tail integral at x = {x:g} does not settle")
    edges = _z_edges(lower, 0.0)
    total = 0.0
    for hi, lo in zip(edges[:-1], edges[1:]):
        p = integrate_finite(integrand, lo, hi, cfg)
        total += p
        if p <= 1e-14 * total and lo <= -4:
            break
    return total


def gamma_integral_equivalence(f, b, a: float = 0.0, grid: Grid = DEFAULT_GRID,
                               sign: Optional[str] = None,
                               cfg: QuadConfig = RELATIVE_QUAD) -> LimitEstimate:
    """Extrapolated ``int_a^x f / (b f)`` (Gamma) or ``int_x^inf f / (b f)`` (Gamma minus).

    ``sign`` defaults to Gamma when ``log f`` increases along the grid tail.
    """
    ff = PositiveFunction.coerce(f)
    bf = PositiveFunction.coerce(b)
    x = grid.points
    if sign is None:
        lf = _grid_log(ff, x[-2:])
        sign = GAMMA if lf[-1] > lf[-2] else GAMMA_MINUS
    bx = np.exp(_grid_log(bf, x))
    vals = []
    for xi, bi in zip(x, bx):
        lower = math.inf if sign == GAMMA_MINUS else (a - xi) / bi
        vals.append(_scaled_integral(ff, float(xi), float(bi), lower, cfg))
    return extrapolate_limit(_pairs(x, vals))


# ---------------------------------------------------------------- W analysis


@dataclass
class WAnalysis:
    """Behaviour of ``W(x) = x / L(x)`` for an L satisfying assumption B.

    ``regime`` is ``"finite"`` when ``W' -> alpha >= 0`` and ``"infinite"``
    when ``W' -> inf``. ``beta_limit`` is the limit of ``x W'/W``.
    """

    W: ex.Expr
    Wprime_limit: LimitEstimate
    regime: str
    alpha: Optional[float]
    beta_limit: Optional[LimitEstimate] = None
    notes: List[str] = field(default_factory=list)

    def predicted_order(self, rho: float) -> float:
        """Order of ``int_a^x U`` for ``U`` in M0plus(L, rho)."""
        return rho + self.alpha if self.regime == "finite" else 0.0

    @property
    def predicted_integral_class(self) -> Tuple[str, str]:
        return ("M0plus", "rho+alpha" if self.regime == "finite" else "0")


def analyze_W(L, grid: Grid = DEFAULT_GRID) -> WAnalysis:
    """Build ``W = x/L`` symbolically and extrapolate ``W'`` along the grid."""
    Lf = PositiveFunction.coerce(L)
    if Lf.expr is None:
        raise ValueError("analyze_W needs L as an expression")
    W = ex.Binary("/", ex.X, Lf.expr)
    Wp = ex.differentiate(W)
    x = grid.points
    s, l = ex.log_eval(Wp, x)
    wp = s * np.exp(l)
    est = extrapolate_limit(_pairs(x, wp))
    notes = []
    if est.diverges and est.value > 0:
        regime, alpha = "infinite", None
    elif est.diverges:
        raise DomainError("W' tends to -inf; W is not eventually increasing")
    else:
        regime = "finite"
        alpha = 0.0 if abs(est.value) <= ZERO_LIMIT else est.value
        if alpha < 0:
            notes.append(f"W' -> {alpha:.4g} < 0")
    beta = None
    try:
        Wf = PositiveFunction(W)
        xb = x * Wf.log_derivative(x)
        beta = extrapolate_limit(_pairs(x, xb))
        if beta.converged and not ZERO_LIMIT < beta.value < 1 - ZERO_LIMIT:
            notes.append(f"x W'/W -> {beta.value:.4g}, outside (0, 1) (informational)")
    except (DomainError, NonPositive):
        pass
    return WAnalysis(W, est, regime, alpha, beta, notes)


def rapid_variation_check(L, a: float = 1.0, grid: Grid = DEFAULT_GRID) -> LimitEstimate:
    """Extrapolated ``log V(2x) - log V(x) = H(2x) - H(x)`` with ``V = exp H``.

    Under assumption B this tends to infinity (V is rapidly varying).
    """
    if not math.isclose(grid.ratio, 2.0):
        grid = Grid(grid.x0, 2.0, grid.steps)
    norm = Normalizer(NormalizerSpec.weighted(L, a), grid)
    d = np.diff(norm.values)
    return extrapolate_limit(_pairs(norm.x[:-1], d))


# ---------------------------------------------------------------- integrals of class members


def integrate_and_classify(U, norm: NormalizerSpec, rho: float, a: Optional[float] = None,
                           grid: Grid = DEFAULT_GRID, tol: float = 0.02,
                           cfg: QuadConfig = RELATIVE_QUAD) -> ClassVerdict:
    """Tabulate the integral of U and re-estimate its order.

    M1 (b normalizer): ``int_a^x U`` for ``rho > 0`` and ``int_x^inf U`` for
    ``rho < 0``, expected in M1(b, rho). M0plus (weighted normalizer):
    ``int_a^x U`` is expected in M0plus(L, rho + alpha) when ``W' -> alpha``
    and of order 0 when ``W' -> inf``. ``details['ratio_limit']`` holds the
    limit of ``int U / (w U / (rho + alpha))`` with ``w = b`` or ``W``,
    which should be 1.

    Raises
    ------
    SlowDivergence
        The order of the integral does not settle on the grid.
    """
    Uf = PositiveFunction.coerce(U)
    a = norm.anchor if a is None else a
    x = grid.points
    notes = []
    if norm.kind is NormalizerKind.SN_B:
        w_fn = PositiveFunction.coerce(norm.expr)
        predicted = rho
        shift = 0.0
    elif norm.kind is NormalizerKind.WEIGHTED:
        if rho <= 0:
            raise ValueError("the M0plus integral result needs rho > 0")
        w_analysis = analyze_W(norm.expr, grid)
        notes.extend(w_analysis.notes)
        predicted = w_analysis.predicted_order(rho)
        shift = w_analysis.alpha if w_analysis.regime == "finite" else math.nan
        w_fn = PositiveFunction(w_analysis.W)
    else:
        raise ValueError("integrate_and_classify needs a b or weighted normalizer")
    tail = rho < 0
    logw = _grid_log(w_fn, x)
    logU = _grid_log(Uf, x)
    J = np.array([_scaled_integral(Uf, float(xi), float(math.exp(lw)),
                                   math.inf if tail else (a - xi) / math.exp(lw), cfg)
                  for xi, lw in zip(x, logw)])
    logI = logw + logU + np.log(J)
    table = PositiveFunction.from_table(x, logI, label="integral")
    if norm.kind is NormalizerKind.SN_B:
        est = estimate_order_sn(table, norm.expr, a, grid)
    else:
        est = estimate_order_weighted(table, norm.expr, a, grid)
    details: Dict[str, object] = {"predicted_order": predicted, "log_integral": logI}
    if math.isfinite(shift):
        ratio = extrapolate_limit(_pairs(x, J * abs(rho + shift)))
        details["ratio_limit"] = ratio
        notes.append(f"int U / (w U / |rho + alpha|) -> {ratio.value:.6g}")
    if not math.isfinite(est.rho) or not est.converged and abs(est.rho - predicted) > tol:
        raise SlowDivergence(f"order of the integral not settled (estimate {est.rho:.4g}, "
                             f"predicted {predicted:.4g})")
    member = abs(est.rho - predicted) <= tol
    notes.insert(0, f"integral order {est.rho:.6g}, predicted {predicted:.6g}")
    return ClassVerdict(member, est, False, None, notes, details)
