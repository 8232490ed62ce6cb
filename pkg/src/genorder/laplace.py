"""Laplace transform ``s * int_0^inf exp(-s x) U(x) dx`` and the Tauberian order check.

With ``t = s x`` the transform is ``int_0^inf exp(-t) U(t/s) dt``. The
exponent ``phi(t) = -t + log U(t/s)`` is first probed on a wide geometric
grid: if it does not fall far below its maximum the transform is declared
infinite, otherwise the probe fixes a cutoff beyond which the integrand is
negligible. The range up to the cutoff is covered by panels geometric in
``x`` (so that the scale ``x ~ 1`` of U is resolved even for tiny ``s``),
with a panel boundary at ``t = 30``. Each panel is integrated with its own
scale factor and the panels are summed in log space, so neither large
values of U nor a peak of the integrand far beyond ``t = 30`` overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .classes import DEFAULT_GRID, ClassVerdict, check_assumption, estimate_order_weighted
from .errors import DivergenceError, DomainError
from .functions import PositiveFunction, log_nonnegative
from .numerics import RELATIVE_QUAD, Grid, QuadConfig, integrate_finite

SPLIT = 30.0
TAUBERIAN_TOL = 0.1


@dataclass(frozen=True)
class LaplaceResult:
    """Value of the transform at ``s`` with the split abscissa ``30/s``."""

    s: float
    value: float
    split_point: float
    error_estimate: float
    log_value: float = math.nan


# the integrand is dropped where phi is this far below its maximum
CUTOFF = 50.0
_PROBE = np.geomspace(1e-8, 1e300, 6000)


def _log_laplace(U: PositiveFunction, s: float, cfg: QuadConfig,
                 lower: float = 0.0) -> Tuple[float, float]:
    """``(log value, relative error estimate)`` of the transform at ``s``.

    U is taken as zero below ``lower``.
    """
    t_lo = s * lower

    def phi(t):
        t = np.asarray(t, dtype=float)
        return -t + log_nonnegative(U, t / s)

    probe = _PROBE[(_PROBE > t_lo) & (_PROBE < 1e300 * s)]
    with np.errstate(over="ignore", invalid="ignore"):
        ph = phi(probe)
    if np.any(np.isnan(ph)):
        raise DomainError(f"{U.label} is undefined at some probe point")
    if np.any(ph == math.inf):
        raise DivergenceError(f"transform of {U.label} overflows at s = {s:g}")
    top = float(np.max(ph))
    if top == -math.inf:
        return -math.inf, 0.0
    if ph[-1] >= top - CUTOFF:
        raise DivergenceError(f"transform of {U.label} is infinite at s = {s:g} "
                              "(integrand does not decay)")
    live = np.flatnonzero(ph >= top - CUTOFF)
    t_cut = max(float(probe[min(live[-1] + 1, len(probe) - 1)]), SPLIT)

    # panel edges: x = lower, then 1, 2, 4, ... beyond it, plus t = 30, up to the cutoff
    edges = [t_lo]
    xe = 1.0
    while xe * s < t_cut:
        if xe * s > t_lo:
            edges.append(xe * s)
        xe *= 2.0
    edges.append(t_cut)
    if t_lo < SPLIT < t_cut:
        edges.append(SPLIT)
    edges = np.unique(edges)

    # exp(phi - ref) carries a relative rounding error of about eps * |phi|
    noise = 64.0 * np.finfo(float).eps * max(1.0, abs(top), t_cut)
    pcfg = replace(cfg, rel_tol=max(cfg.rel_tol, noise))
    logs = []
    stack = [(float(lo), float(hi), 0) for lo, hi in zip(edges[::-1][1:], edges[::-1][:-1])]
    while stack:
        lo, hi, depth = stack.pop()
        with np.errstate(over="ignore", invalid="ignore"):
            local = phi(np.linspace(lo, hi, 33))
        finite = local[np.isfinite(local)]
        if finite.size and finite.max() < top - 2 * CUTOFF:
            continue
        # split panels on which the exponent varies too much for one scale factor
        if finite.size and finite.max() - finite.min() > 40.0 and depth < 60:
            mid = 0.5 * (lo + hi) if lo <= 0 or hi < 4 * lo else math.sqrt(lo * hi)
            stack.extend([(mid, hi, depth + 1), (lo, mid, depth + 1)])
            continue
        ref = float(finite.max()) if finite.size else 0.0

        def integrand(t, ref=ref):
            with np.errstate(over="ignore"):
                return np.exp(phi(t) - ref)

        try:
            p = integrate_finite(integrand, lo, hi, pcfg)
        except DomainError:
            raise DivergenceError(f"transform of {U.label} overflows at s = {s:g}") from None
        if not math.isfinite(p):
            raise DivergenceError(f"transform of {U.label} overflows at s = {s:g}")
        if p > 0:
            logs.append(ref + math.log(p))
    if not logs:
        return -math.inf, 0.0
    logs = np.array(logs)
    total = float(np.logaddexp.reduce(logs))
    # weight each panel's relative tolerance by its share of the total
    rel = float(np.sum(np.exp(logs - total))) * pcfg.rel_tol + math.exp(top - CUTOFF - total)
    return total, rel


def laplace_transform(U, s: float, cfg: QuadConfig = RELATIVE_QUAD, *,
                      lower: float = 0.0) -> LaplaceResult:
    """``s * int_lower^inf exp(-s x) U(x) dx`` for a nonnegative, locally bounded U.

    ``lower`` truncates U to ``[lower, inf)``, which does not change the
    asymptotics as ``s -> 0`` but lets functions that are negative or
    undefined near 0 (``log x``) be transformed.

    Raises
    ------
    DivergenceError
        When the transform is infinite (the integrand does not decay).
    """
    if not s > 0:
        raise ValueError("s must be positive")
    if lower < 0:
        raise ValueError("lower must be nonnegative")
    Uf = PositiveFunction.coerce(U)
    logv, rel_err = _log_laplace(Uf, float(s), cfg, float(lower))
    value = math.exp(logv) if logv < 709.0 else math.inf
    return LaplaceResult(float(s), value, SPLIT / s, rel_err * value, logv)


def log_laplace_table(U, grid: Grid = DEFAULT_GRID, cfg: QuadConfig = RELATIVE_QUAD, *,
                      lower: float = 0.0) -> np.ndarray:
    """``log Uhat(1/x_k)`` at the grid abscissae."""
    Uf = PositiveFunction.coerce(U)
    return np.array([_log_laplace(Uf, 1.0 / xk, cfg, lower)[0] for xk in grid.points])


def _support_start(U: PositiveFunction, a: float) -> float:
    """0 when U is nonnegative on ``[0, a]`` (sampled), else the anchor ``a``."""
    x = np.concatenate([[0.0], np.geomspace(1e-12, max(a, 1e-12), 200)])
    try:
        with np.errstate(all="ignore"):
            lu = log_nonnegative(U, x)
        if np.all(~np.isnan(lu)) and np.all(lu < math.inf):
            return 0.0
    except DomainError:
        pass
    return a


def _nondecreasing(U: PositiveFunction, grid: Grid) -> bool:
    x = np.unique(np.concatenate([grid.points, np.geomspace(grid.points[0], grid.points[-1], 64)]))
    lu = log_nonnegative(U, x)
    return bool(np.all(np.diff(lu) >= -1e-12 * np.maximum(1.0, np.abs(lu[1:]))))


def tauberian_order_check(U, L, a: float, rho: float, grid: Grid = DEFAULT_GRID, *,
                          assert_hypotheses: bool = False, tol: float = TAUBERIAN_TOL,
                          cfg: QuadConfig = RELATIVE_QUAD) -> ClassVerdict:
    """Estimate the M0(L) order of ``x -> Uhat(1/x)`` and compare with ``rho``.

    ``member`` is None (inconclusive) when the order of the transform does
    not converge on the grid. The concavity hypothesis of the converse is
    never tested; unless the caller asserts it (and U is nondecreasing on
    the grid) the verdict is labelled forward-only.
    """
    Uf = PositiveFunction.coerce(U)
    notes = []
    monotone = _nondecreasing(Uf, grid)
    if not monotone:
        notes.append("U is not nondecreasing on the grid")
    if assert_hypotheses and monotone:
        notes.append("two-sided: hypotheses asserted by the caller")
    else:
        notes.append("forward-only: concavity hypothesis not verified")
    lower = _support_start(Uf, a)
    if lower > 0:
        notes.append(f"U is not nonnegative on [0, {a:g}]; transformed U on [{a:g}, inf)")
    verdict = check_assumption(L, a, grid)
    logs = log_laplace_table(Uf, grid, cfg, lower=lower)
    table = PositiveFunction.from_table(grid.points, logs, label=f"laplace[{Uf.label}]")
    est = estimate_order_weighted(table, L, a, grid, assumption=verdict)
    if not est.converged:
        member: Optional[bool] = None
        notes.insert(0, f"order of Uhat(1/x) not converged ({est.limit.method}, {est.rho:.4g})")
    else:
        member = abs(est.rho - rho) <= tol
        notes.insert(0, f"order of Uhat(1/x) {est.rho:.6g}, expected {rho:.6g}")
    return ClassVerdict(member, est, False, None, notes,
                        {"log_transform": logs, "monotone": monotone, "lower": lower,
                         "two_sided": bool(assert_hypotheses and monotone)})
