"""Order estimation for the classes M, M0, M0minus, M0plus and M1.

All of them measure ``log U`` against a normalizer:

=========  ===========================================  ===================
class      normalizer                                   assumption on L, b
=========  ===========================================  ===================
M          ``log x``                                    none
M0         ``H(x) = int_a^x L(t)/t dt``                 L -> 0, H -> inf (A)
M0plus     ``H(x)`` as above                            L -> inf (B)
M0minus    ``T(x) = int_x^inf L(t)/t dt``               T finite (C)
M1         ``int_a^x 1/b(t) dt``                        b(x)/x -> 0
=========  ===========================================  ===================

and the order is the limit of the ratio, extrapolated along a geometric
grid with :func:`genorder.numerics.extrapolate_limit`. The remaining
functions check statements that hold for members of these classes: the
two-sided bound by powers of ``V = exp H``, the representation with
``alpha, beta, eps`` and the derivative criteria.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import expr as ex
from .errors import (BNotSuitable, DepthExceeded, DerivativeVanishes, DomainError, Inconclusive,
                     NonPositive, NormalizerDegenerate, NotFound, TooFewPoints)
from .functions import (Normalizer, NormalizerKind, NormalizerSpec, PositiveFunction,
                        gauss_legendre)
from .numerics import (RELATIVE_QUAD, Grid, LimitEstimate, QuadConfig, _aitken,
                       extrapolate_limit, integrate_to_infinity)

DEFAULT_GRID = Grid()
# agreement tolerance between independent estimates of the same order
AGREEMENT_FLOOR = 5e-3
# a ratio limit counts as zero below this
ZERO_LIMIT = 1e-3
# "tends to infinity" threshold used by the characterization: 1/delta
DELTA = 1e-3


@dataclass
class AssumptionVerdict:
    """Which of the assumptions A, B, C (or none) a function L satisfies."""

    label: Optional[str]
    L_limit: LimitEstimate
    integral_diverges: bool
    evidence: Dict[str, object] = field(default_factory=dict)


@dataclass
class OrderEstimate:
    """Estimated order ``rho`` with liminf/limsup bounds of the ratio.

    ``table`` holds the sampled ``x``, normalizer ``H``, ``logU`` and
    ``ratio`` columns.
    """

    rho: float
    rho_L: float
    rho_U: float
    limit: LimitEstimate
    class_id: str
    normalizer: NormalizerSpec
    table: Dict[str, np.ndarray] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.limit.converged

    @property
    def uncertainty(self) -> float:
        return self.limit.uncertainty


@dataclass
class RepresentationDecomposition:
    """Tabulated ``eps, beta, alpha`` of the representation of U.

    Weighted kind: ``log U = alpha + int beta L(t)/t dt`` with
    ``beta = rho + eps``; tail kind: the same with ``int_x^inf``.
    """

    rho: float
    x: np.ndarray
    H: np.ndarray
    eps: np.ndarray
    beta: np.ndarray
    alpha: np.ndarray
    alpha_ratio_limit: LimitEstimate


@dataclass
class ClassVerdict:
    """Outcome of a membership check. ``member`` is None when inconclusive."""

    member: Optional[bool]
    order: Optional[OrderEstimate] = None
    characterization_passed: bool = False
    x_epsilon: Optional[float] = None
    notes: List[str] = field(default_factory=list)
    details: Dict[str, object] = field(default_factory=dict)


# ---------------------------------------------------------------- helpers


def _pairs(x, y):
    return np.column_stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])


def _agree(a: float, b: float, unc: float = 0.0) -> bool:
    return abs(a - b) <= max(2.0 * unc, AGREEMENT_FLOOR)


def _ratio_bounds(ratio: np.ndarray, est: LimitEstimate) -> Tuple[float, float]:
    """liminf/limsup of a ratio sequence from its last half.

    A converged or non-oscillating sequence gives ``value -+ uncertainty``.
    Otherwise the bounds are the extremes of the last half, replaced by the Aitken
    extrapolant of the local minima (maxima) when those form a contracting
    monotone sequence.
    """
    if est.diverges:
        return est.value, est.value
    v = est.value
    half = ratio[len(ratio) // 2:]
    d = np.diff(half)
    d = d[d != 0]
    turns = int(np.sum(np.sign(d[1:]) != np.sign(d[:-1])))
    if turns < 2 or (est.converged and not est.oscillatory):
        return v - est.uncertainty, v + est.uncertainty
    lower, upper = float(half.min()), float(half.max())
    inner = half[1:-1]
    minima = inner[(inner <= half[:-2]) & (inner <= half[2:])]
    maxima = inner[(inner >= half[:-2]) & (inner >= half[2:])]

    def refine(ext, current):
        if len(ext) < 3:
            return current
        d = np.diff(ext[-3:])
        if d[0] != 0 and np.sign(d[0]) == np.sign(d[1]) and abs(d[1]) < abs(d[0]):
            return float(_aitken(*ext[-3:]))
        return current

    return refine(minima, lower), refine(maxima, upper)


def _grid_log(U: PositiveFunction, x: np.ndarray) -> np.ndarray:
    try:
        return np.asarray(U.log(x), dtype=float)
    except NonPositive:
        raise
    except DomainError as err:
        raise DomainError(f"{U.label} cannot be evaluated on the grid: {err}") from err


def _estimate(U, norm: Normalizer, class_id: str, warnings=()) -> OrderEstimate:
    U = PositiveFunction.coerce(U)
    x = norm.x
    H = norm.values
    logU = _grid_log(U, x)
    keep = H > 0
    if norm.kind is NormalizerKind.LOG:
        keep = x > 1
    if keep.sum() < 8:
        raise TooFewPoints("fewer than 8 grid points with a positive normalizer")
    if norm.kind is not NormalizerKind.TAIL and H[-1] < 1e-8:
        raise NormalizerDegenerate(f"normalizer only reaches {H[-1]:.3g} on the grid")
    xs, Hs, ls = x[keep], H[keep], logU[keep]
    ratio = ls / Hs
    scale = 1.0 / Hs if norm.kind is NormalizerKind.TAIL else Hs
    est = extrapolate_limit(_pairs(xs, ratio), scale=scale)
    lo, hi = _ratio_bounds(ratio, est)
    notes = list(warnings) + list(norm.warnings)
    if not est.converged:
        notes.append(f"ratio limit not converged (method {est.method})")
    table = {"x": xs, "H": Hs, "logU": ls, "ratio": ratio}
    return OrderEstimate(est.value, min(lo, hi), max(lo, hi), est, class_id, norm.spec, table,
                         notes)


# ---------------------------------------------------------------- assumptions


def check_assumption(L, a: float = 1.0, grid: Grid = DEFAULT_GRID,
                     cfg: QuadConfig = RELATIVE_QUAD) -> AssumptionVerdict:
    """Decide which assumption L satisfies.

    A: ``L -> 0`` and ``int_a^inf L(t)/t dt = inf``; B: ``L -> inf``;
    C: the integral is finite; None: anything else (e.g. ``L -> c > 0``).

    Raises
    ------
    NonPositive
        L is not positive on the grid.
    Inconclusive
        The limit of L neither converges nor diverges on the grid.
    """
    Lf = PositiveFunction.coerce(L)
    x = grid.points
    Lx = np.exp(_grid_log(Lf, x))
    L_limit = extrapolate_limit(_pairs(x, Lx))

    def density(u):
        return np.exp(Lf.log(log_x=u))

    start = math.log(a) if a > 0 else None
    try:
        if start is None:
            raise DomainError("anchor not positive")
        integral = integrate_to_infinity(density, start, cfg)
    except (DomainError, DepthExceeded):
        integral = integrate_to_infinity(density, float(grid.log_points[0]), cfg)
    diverges = math.isinf(integral)
    evidence = {"x": x, "L": Lx, "integral": integral}
    if not diverges:
        label = "C"
    elif L_limit.diverges and L_limit.value > 0:
        label = "B"
    elif abs(L_limit.value) <= ZERO_LIMIT:
        label = "A"
    elif L_limit.converged:
        label = None
    else:
        raise Inconclusive(f"limit of L = {Lf.label} not established on the grid")
    return AssumptionVerdict(label, L_limit, diverges, evidence)


# ---------------------------------------------------------------- estimators


def estimate_order_M(U, grid: Grid = DEFAULT_GRID) -> OrderEstimate:
    """Order in the classical sense: the limit of ``log U(x) / log x``."""
    norm = Normalizer(NormalizerSpec.log(), grid)
    return _estimate(U, norm, "M")


def estimate_order_weighted(U, L, a: float = 1.0, grid: Grid = DEFAULT_GRID, *,
                            assumption: Optional[AssumptionVerdict] = None,
                            cfg: QuadConfig = RELATIVE_QUAD) -> OrderEstimate:
    """Limit of ``log U(x) / int_a^x L(t)/t dt`` (classes M0 and M0plus).

    The class is M0 under assumption A and M0plus under B; the assumption is
    checked unless a verdict is passed in.
    """
    if assumption is None:
        assumption = check_assumption(L, a, grid, cfg)
    warnings = []
    if assumption.label == "C":
        raise NormalizerDegenerate("the normalizing integral converges; use estimate_order_tail")
    class_id = {"A": "M0", "B": "M0plus"}.get(assumption.label)
    if class_id is None:
        class_id = "M0"
        warnings.append("L satisfies neither assumption A nor B")
    norm = Normalizer(NormalizerSpec.weighted(L, a), grid, cfg)
    return _estimate(U, norm, class_id, warnings)


def estimate_order_tail(U, L, a: float = 1.0, grid: Grid = DEFAULT_GRID,
                        cfg: QuadConfig = RELATIVE_QUAD) -> OrderEstimate:
    """Limit of ``log U(x) / int_x^inf L(t)/t dt`` (class M0minus).

    Raises
    ------
    TailVanished
        The tail integral diverges or underflows on the grid.
    """
    norm = Normalizer(NormalizerSpec.tail(L, a), grid, cfg)
    return _estimate(U, norm, "M0minus")


def check_b_suitable(b, grid: Grid = DEFAULT_GRID) -> LimitEstimate:
    """Extrapolated ``b(x)/x``; raises BNotSuitable unless it tends to 0."""
    bf = PositiveFunction.coerce(b)
    x = grid.points
    ratio = np.exp(_grid_log(bf, x) - np.log(x))
    est = extrapolate_limit(_pairs(x, ratio))
    if est.diverges or abs(est.value) > ZERO_LIMIT:
        raise BNotSuitable(f"b(x)/x tends to {est.value:.4g}, not 0, for b = {bf.label}")
    return est


def estimate_order_sn(U, b, a: float = 1.0, grid: Grid = DEFAULT_GRID,
                      cfg: QuadConfig = RELATIVE_QUAD) -> OrderEstimate:
    """Limit of ``log U(x) / int_a^x dt/b(t)`` (class M1)."""
    check_b_suitable(b, grid)
    norm = Normalizer(NormalizerSpec.sn(b, a), grid, cfg)
    return _estimate(U, norm, "M1")


def estimate_order(U, norm: NormalizerSpec, grid: Grid = DEFAULT_GRID,
                   cfg: QuadConfig = RELATIVE_QUAD) -> OrderEstimate:
    """Dispatch to the estimator matching the normalizer kind."""
    if norm.kind is NormalizerKind.LOG:
        return estimate_order_M(U, grid)
    if norm.kind is NormalizerKind.WEIGHTED:
        return estimate_order_weighted(U, norm.expr, norm.anchor, grid, cfg=cfg)
    if norm.kind is NormalizerKind.TAIL:
        return estimate_order_tail(U, norm.expr, norm.anchor, grid, cfg)
    return estimate_order_sn(U, norm.expr, norm.anchor, grid, cfg)


def estimate_order_bounds(U, norm: NormalizerSpec, grid: Grid = DEFAULT_GRID) -> Tuple[float, float]:
    """liminf and limsup of the order ratio (O-type bounds)."""
    est = estimate_order(U, norm, grid)
    return est.rho_L, est.rho_U


# ---------------------------------------------------------------- characterization


def _trend(d: np.ndarray, H: np.ndarray, direction: int, eps: float) -> str:
    """'pass', 'fail' or 'unclear' for ``d -> direction * inf`` on the last quartile."""
    q = max(len(d) // 4, 3)
    dq, Hq = d[-q:], H[-q:]
    slope = np.polyfit(Hq, dq, 1)[0]
    steps = np.diff(dq) * direction
    if direction * slope >= 0.5 * eps and np.all(steps > 0):
        return "pass"
    if direction * slope <= 0:
        return "fail"
    return "unclear"


def characterize(U, norm: NormalizerSpec, rho: float, eps: float,
                 grid: Grid = DEFAULT_GRID) -> ClassVerdict:
    """Check ``U / V**(rho+eps) -> 0`` and ``U / V**(rho-eps) -> inf``, ``V = exp H``.

    Both ratios are formed in log space, ``d = log U - (rho -+ eps) H``.
    Since ``H -> inf``, a last-quartile trend that is monotone with slope at
    least ``eps/2`` against ``H`` certifies the limit. Whether ``d`` has
    already passed ``log(1/delta)`` on the grid is reported in the notes.

    Raises
    ------
    Inconclusive
        Neither limit is refuted but at least one trend is not monotone.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if norm.kind is NormalizerKind.TAIL:
        raise ValueError("the characterization needs a divergent normalizer")
    order = estimate_order(U, norm, grid)
    H = order.table["H"]
    logU = order.table["logU"]
    upper = logU - (rho + eps) * H
    lower = logU - (rho - eps) * H
    up = _trend(upper, H, -1, eps)
    lo = _trend(lower, H, +1, eps)
    notes = [f"U/V^(rho+eps) -> 0: {up}", f"U/V^(rho-eps) -> inf: {lo}"]
    threshold = math.log(1.0 / DELTA)
    if up == "pass" and upper[-1] > -threshold:
        notes.append(f"U/V^(rho+eps) = {math.exp(upper[-1]):.3g} at the last grid point (> delta)")
    if lo == "pass" and lower[-1] < threshold:
        notes.append(f"U/V^(rho-eps) = {math.exp(lower[-1]):.3g} at the last grid point (< 1/delta)")
    if "fail" in (up, lo):
        passed = False
    elif "unclear" in (up, lo):
        raise Inconclusive("; ".join(notes))
    else:
        passed = True
    member = passed and order.converged and abs(order.rho - rho) <= eps
    x_eps = None
    if passed:
        try:
            x_eps = locate_sandwich(U, norm, rho, eps, grid, order=order)
        except NotFound:
            notes.append("no sandwich threshold on the grid")
    return ClassVerdict(member, order, passed, x_eps, notes)


def locate_sandwich(U, norm: NormalizerSpec, rho: float, eps: float,
                    grid: Grid = DEFAULT_GRID, *, order: Optional[OrderEstimate] = None,
                    samples_per_panel: int = 4096) -> float:
    """Smallest x beyond which ``V^(rho-eps) <= U <= V^(rho+eps)`` holds.

    The grid is checked first; each panel between grid points is then
    scanned on ``samples_per_panel`` equally spaced points, so violations
    between grid points (oscillating perturbations) are caught. The result
    is the first sample after the last violation. Set
    ``samples_per_panel=0`` for the grid-only answer.

    Raises
    ------
    NotFound
        The inequality fails somewhere in the last quartile.
    """
    if order is None:
        order = estimate_order(U, norm, grid)
    x, H, logU = order.table["x"], order.table["H"], order.table["logU"]
    ok = ((rho - eps) * H <= logU) & (logU <= (rho + eps) * H)
    q = max(len(x) // 4, 2)
    if not np.all(ok[-q:]):
        raise NotFound("sandwich inequality violated in the last quartile of the grid")
    bad = np.flatnonzero(~ok)
    k = 0 if len(bad) == 0 else int(bad[-1]) + 1
    if samples_per_panel <= 0:
        return float(x[k])
    Uf = PositiveFunction.coerce(U)
    N = Normalizer(norm, grid)
    frac = np.arange(1, samples_per_panel + 1) / (samples_per_panel + 1)
    xs = (x[:-1, None] + (x[1:] - x[:-1])[:, None] * frac).ravel()
    Hs = N.at_log(np.log(xs))
    ls = Uf.log(xs)
    dense_ok = ((rho - eps) * Hs <= ls) & (ls <= (rho + eps) * Hs)
    if not np.all(dense_ok[xs >= x[-q]]):
        raise NotFound("sandwich inequality violated in the last quartile of the grid")
    all_x = np.concatenate([x, xs])
    all_ok = np.concatenate([ok, dense_ok])
    order_x = np.argsort(all_x, kind="stable")
    all_x, all_ok = all_x[order_x], all_ok[order_x]
    bad = np.flatnonzero(~all_ok)
    return float(all_x[0 if len(bad) == 0 else int(bad[-1]) + 1])


# ---------------------------------------------------------------- representation


def decompose_representation(U, L, a: float, rho: float, grid: Grid = DEFAULT_GRID,
                             cfg: QuadConfig = RELATIVE_QUAD) -> RepresentationDecomposition:
    """Tabulate ``eps = log U/H - rho``, ``beta = rho + eps`` and
    ``alpha = eps*H - int eps(t) L(t)/t dt``.

    The inner integral starts at the first grid point rather than at the
    anchor, where ``eps`` is singular because ``H(a) = 0``; this shifts
    ``alpha`` by a constant, which does not affect ``alpha/H -> 0``.
    """
    Uf = PositiveFunction.coerce(U)
    norm = Normalizer(NormalizerSpec.weighted(L, a), grid, cfg)
    x, u, H = norm.x, norm.u, norm.values
    if H[0] <= 0:
        raise NormalizerDegenerate("normalizer vanishes at the first grid point; use an anchor below it")
    logU = _grid_log(Uf, x)
    eps = logU / H - rho

    def integrand(v):
        return (Uf.log(log_x=v) / norm.at_log(v) - rho) * norm.density(v)

    panels = gauss_legendre(integrand, u[:-1], u[1:])
    inner = np.concatenate([[0.0], np.cumsum(panels)])
    alpha = eps * H - inner
    limit = extrapolate_limit(_pairs(x, alpha / H), scale=H)
    return RepresentationDecomposition(rho, x, H, eps, rho + eps, alpha, limit)


def decompose_representation_tail(U, L, a: float, rho: float, grid: Grid = DEFAULT_GRID,
                                  cfg: QuadConfig = RELATIVE_QUAD,
                                  extension: int = 64) -> RepresentationDecomposition:
    """Tail version: ``eps = log U/T - rho`` and
    ``alpha = eps*T - int_x^inf eps(t) L(t)/t dt``.

    The outer integral beyond the grid is summed over ``extension`` further
    doubling panels, with T at their ends accumulated backwards from a
    single tail integral.
    """
    Uf = PositiveFunction.coerce(U)
    norm = Normalizer(NormalizerSpec.tail(L, a), grid, cfg)
    x, u, T = norm.x, norm.u, norm.values
    logU = _grid_log(Uf, x)
    eps = logU / T - rho
    step = float(u[1] - u[0])
    ext = u[-1] + step * np.arange(extension + 1)
    far = integrate_to_infinity(norm.density, float(ext[-1]), cfg)
    ext_panels = gauss_legendre(norm.density, ext[:-1], ext[1:])
    T_ext = far + np.concatenate([np.cumsum(ext_panels[::-1])[::-1], [0.0]])
    all_u = np.concatenate([u, ext[1:]])
    all_T = np.concatenate([T, T_ext[1:]])

    def panel(lo, hi, T_hi):
        def integrand(v):
            Tv = T_hi[..., None] + gauss_legendre(norm.density, v, np.broadcast_to(hi[..., None], v.shape))
            return (Uf.log(log_x=v) / Tv - rho) * norm.density(v)
        return gauss_legendre(integrand, lo, hi)

    contrib = panel(all_u[:-1], all_u[1:], all_T[1:])
    inner = np.cumsum(contrib[::-1])[::-1][:len(u)]
    alpha = eps * T - inner
    limit = extrapolate_limit(_pairs(x, alpha / T), scale=1.0 / T)
    return RepresentationDecomposition(rho, x, T, eps, rho + eps, alpha, limit)


def check_m0minus_ratio(U, L, a: float = 1.0, grid: Grid = DEFAULT_GRID,
                        cfg: QuadConfig = RELATIVE_QUAD) -> LimitEstimate:
    """Extrapolated ``(U(x) - 1) / int_x^inf L(t)/t dt``."""
    Uf = PositiveFunction.coerce(U)
    norm = Normalizer(NormalizerSpec.tail(L, a), grid, cfg)
    y = np.expm1(_grid_log(Uf, norm.x)) / norm.values
    return extrapolate_limit(_pairs(norm.x, y), scale=1.0 / norm.values)


# ---------------------------------------------------------------- criteria


def check_derivative_criterion(U, norm: NormalizerSpec, grid: Grid = DEFAULT_GRID) -> LimitEstimate:
    """Extrapolated ``x U'/(L U)`` (weighted kind) or ``b U'/U`` (b kind).

    The log kind uses ``x U'/U``.
    """
    Uf = PositiveFunction.coerce(U)
    x = grid.points
    dlog = np.asarray(Uf.log_derivative(x), dtype=float)
    if norm.kind is NormalizerKind.SN_B:
        y = dlog * np.exp(PositiveFunction.coerce(norm.expr).log(x))
    elif norm.kind is NormalizerKind.LOG:
        y = x * dlog
    elif norm.kind is NormalizerKind.WEIGHTED:
        y = x * dlog * np.exp(-PositiveFunction.coerce(norm.expr).log(x))
    else:
        raise ValueError("derivative criterion needs a weighted, log or b normalizer")
    if not np.all(np.isfinite(y)):
        raise DomainError("derivative criterion is not finite on the grid")
    return extrapolate_limit(_pairs(x, y))


def sequence_order(a_seq: Callable, b_seq: Callable, N: int = 2 ** 20, *,
                   log_a: bool = False) -> LimitEstimate:
    """Extrapolated ``log a_n / sum_{k<=n} b_k/k`` at ``n = N, N/2, N/4, ...``.

    ``a_seq`` returns ``a_n`` (or ``log a_n`` with ``log_a=True``, which
    avoids overflow for fast-growing sequences).
    """
    if N < 256:
        raise TooFewPoints("N must be at least 256 to give 8 checkpoints")
    k = np.arange(1, N + 1)
    try:
        bk = np.asarray(b_seq(k), dtype=float)
        if bk.shape != k.shape:
            raise TypeError
    except (TypeError, ValueError):
        bk = np.array([b_seq(int(i)) for i in k], dtype=float)
    S = np.cumsum(bk / k)
    n = sorted({N >> j for j in range(N.bit_length()) if (N >> j) >= 2})
    n = np.array(n)
    vals = []
    for m in n:
        v = float(a_seq(int(m)))
        if log_a:
            vals.append(v)
            continue
        if not v > 0:
            raise NonPositive(f"a_{m} = {v} is not positive")
        if math.isinf(v):
            raise OverflowError(f"a_{m} overflows; pass log a_n with log_a=True")
        vals.append(math.log(v))
    Sn = S[n - 1]
    if np.any(Sn <= 0):
        raise NormalizerDegenerate("partial sums of b_k/k must be positive")
    return extrapolate_limit(_pairs(n, np.array(vals) / Sn), scale=Sn)


def log_derivative_order(U, grid: Grid = DEFAULT_GRID) -> LimitEstimate:
    """Extrapolated ``log U(x) / log|U'(x)|``."""
    Uf = PositiveFunction.coerce(U)
    if Uf.expr is None:
        raise ValueError("log_derivative_order needs a symbolic expression")
    x = grid.points
    sign, ld = ex.log_eval(ex.differentiate(Uf.expr), x)
    if np.any(sign == 0) or np.any(np.isinf(ld)):
        raise DerivativeVanishes(f"U' vanishes on the grid for U = {Uf.label}")
    if np.any(ld == 0):
        raise DerivativeVanishes("|U'| = 1 makes the ratio undefined on the grid")
    y = _grid_log(Uf, x) / ld
    return extrapolate_limit(_pairs(x, y))


# ---------------------------------------------------------------- algebra


@dataclass
class AlgebraResult:
    """Orders of U, V, U*V and U/V against the expected sums.

    ``c`` is the limit of ``b_U / b_V`` (1 when both share a normalizer);
    the expected orders are ``rho_U +- c*rho_V``.
    """

    order_U: OrderEstimate
    order_V: OrderEstimate
    order_product: OrderEstimate
    order_quotient: OrderEstimate
    c: float
    tolerance: float

    @property
    def expected_product(self) -> float:
        return self.order_U.rho + self.c * self.order_V.rho

    @property
    def expected_quotient(self) -> float:
        return self.order_U.rho - self.c * self.order_V.rho

    @property
    def product_ok(self) -> bool:
        return abs(self.order_product.rho - self.expected_product) <= self.tolerance

    @property
    def quotient_ok(self) -> bool:
        return abs(self.order_quotient.rho - self.expected_quotient) <= self.tolerance


def _combine(U: PositiveFunction, V: PositiveFunction, op: str) -> PositiveFunction:
    sign = 1.0 if op == "*" else -1.0
    if U.expr is not None and V.expr is not None:
        return PositiveFunction(ex.Binary(op, U.expr, V.expr))
    return PositiveFunction(log_callable=lambda x: U.log(x) + sign * V.log(x),
                            label=f"({U.label}){op}({V.label})")


def algebra_orders(U, V, norm: NormalizerSpec, grid: Grid = DEFAULT_GRID, *,
                   norm_V: Optional[NormalizerSpec] = None, tol: float = 0.02) -> AlgebraResult:
    """Estimate the orders of U, V, U*V and U/V under ``norm``.

    V is estimated under ``norm_V`` (default ``norm``). For two b
    normalizers with ``b_U/b_V -> c`` the product has order
    ``rho_U + c*rho_V``; ``tol`` is widened by the estimates' own
    uncertainties.
    """
    Uf, Vf = PositiveFunction.coerce(U), PositiveFunction.coerce(V)
    norm_V = norm if norm_V is None else norm_V
    c = 1.0
    if norm_V is not norm and norm_V != norm:
        if norm.kind is not NormalizerKind.SN_B or norm_V.kind is not NormalizerKind.SN_B:
            raise ValueError("different normalizers are only supported for two b functions")
        x = grid.points
        b1, b2 = PositiveFunction.coerce(norm.expr), PositiveFunction.coerce(norm_V.expr)
        c = extrapolate_limit(_pairs(x, np.exp(b1.log(x) - b2.log(x)))).value
    oU = estimate_order(Uf, norm, grid)
    oV = estimate_order(Vf, norm_V, grid)
    oP = estimate_order(_combine(Uf, Vf, "*"), norm, grid)
    oQ = estimate_order(_combine(Uf, Vf, "/"), norm, grid)
    unc = sum(o.uncertainty for o in (oU, oV, oP) if math.isfinite(o.uncertainty))
    return AlgebraResult(oU, oV, oP, oQ, c, max(tol, unc))


def composition_order(U, L, V, a: float, grid: Grid = DEFAULT_GRID) -> Tuple[OrderEstimate, LimitEstimate]:
    """Order of ``U(V(x))`` under the normalizer ``L(V(x))``, with ``lim x V'/V``.

    For U in M0(L, alpha) and ``x V'/V -> beta > 0`` the order is
    ``alpha*beta``. U, L and V must be expressions.
    """
    Ue, Le, Ve = ex.as_expr(U), ex.as_expr(L), ex.as_expr(V)
    UV = ex.substitute(Ue, Ve)
    LV = ex.substitute(Le, Ve)
    x = grid.points
    beta = extrapolate_limit(_pairs(x, x * PositiveFunction(Ve).log_derivative(x)))
    return estimate_order_weighted(UV, LV, a, grid), beta
