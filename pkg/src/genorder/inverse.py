"""Numeric inverse of an eventually increasing function and the order transfer M1 -> M0.

If ``b U'/U -> rho > 0`` then ``V = U^inv`` has order ``1/rho`` with respect
to ``L(y) = b(V(y)) / V(y)``. Values of U are handled through ``log U``, so
targets far beyond the float range (``U = exp(2x)`` at ``x = 1e12``) are
given as ``log y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .classes import (DEFAULT_GRID, ClassVerdict, check_assumption, check_derivative_criterion,
                      estimate_order_weighted)
from .errors import HypothesisFailed, NotBracketed, NotIncreasing
from .functions import NormalizerSpec, PositiveFunction, log_nonnegative
from .numerics import Grid

MAX_BISECTIONS = 60
MAX_EXPANSIONS = 600
INVERSE_TOL = 0.05


@dataclass
class InverseFn:
    """An increasing function beyond ``domain_start`` prepared for inversion."""

    source: object
    domain_start: float = DEFAULT_GRID.x0
    bracket_growth: float = 4.0

    def __post_init__(self):
        self.source = PositiveFunction.coerce(self.source)
        if not self.bracket_growth > 1:
            raise ValueError("bracket_growth must exceed 1")

    def log_value(self, x):
        return log_nonnegative(self.source, np.asarray(x, dtype=float))


def _check_increasing(inv: InverseFn, hi: float):
    x = np.linspace(inv.domain_start, hi, 64)
    lv = inv.log_value(x)
    if np.any(np.diff(lv) <= 0):
        k = int(np.argmax(np.diff(lv) <= 0))
        raise NotIncreasing(f"{inv.source.label} is not increasing near x = {x[k]:.6g}")


def numeric_inverse(inv: InverseFn, y=None, tol: float = 1e-12, *, log_y=None):
    """Solve ``U(x) = y`` for ``x >= domain_start``.

    Brackets grow geometrically from ``domain_start``; bisection (geometric
    while the bracket spans more than a factor two) runs at most 60 times.
    The target may be given as ``log_y`` instead of ``y``.

    Raises
    ------
    NotBracketed
        ``y < U(domain_start)`` or no bracket found.
    NotIncreasing
        The 64-point monotonicity spot check fails on the bracket.
    """
    if (y is None) == (log_y is None):
        raise TypeError("give exactly one of y or log_y")
    if log_y is None:
        yv = np.asarray(y, dtype=float)
        if np.any(yv <= 0):
            raise NotBracketed("targets must be positive")
        log_y = np.log(yv)
    ly = np.atleast_1d(np.asarray(log_y, dtype=float))
    scalar = np.ndim(log_y) == 0
    x0 = float(inv.domain_start)
    l0 = float(np.atleast_1d(inv.log_value(np.array([x0])))[0])
    if np.any(ly < l0 - tol):
        raise NotBracketed(f"target below U(domain_start) = exp({l0:.6g})")
    lo = np.full(ly.shape, x0)
    hi = np.full(ly.shape, x0)
    step = max(1.0, abs(x0))
    open_ = np.ones(ly.shape, dtype=bool)
    for _ in range(MAX_EXPANSIONS):
        hi = np.where(open_, x0 + step, hi)
        with np.errstate(over="ignore"):
            lh = inv.log_value(hi)
        done = open_ & (lh >= ly)
        lo = np.where(open_ & ~done, hi, lo)
        open_ &= ~done
        if not open_.any():
            break
        step *= inv.bracket_growth
        if not math.isfinite(x0 + step):
            break
    if open_.any():
        raise NotBracketed(f"no bracket for target exp({float(ly[open_][0]):.6g})")
    _check_increasing(inv, float(hi.max()))
    for _ in range(MAX_BISECTIONS):
        geometric = (lo > 0) & (hi > 2 * lo)
        mid = np.where(geometric, np.sqrt(np.abs(lo * hi)), 0.5 * (lo + hi))
        lm = inv.log_value(mid)
        up = lm >= ly
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
        if np.all((hi - lo) <= 4e-16 * np.maximum(np.abs(hi), 1e-300)):
            break
    ll, lh = inv.log_value(lo), inv.log_value(hi)
    with np.errstate(invalid="ignore"):
        w = np.where(lh > ll, (ly - ll) / (lh - ll), 0.5)
    x = lo + np.clip(np.nan_to_num(w, nan=0.5), 0.0, 1.0) * (hi - lo)
    return float(x[0]) if scalar else x


def inverse_order_check(U, b, rho: float, grid: Grid = DEFAULT_GRID, *,
                        domain_start: Optional[float] = None,
                        tol: float = INVERSE_TOL) -> ClassVerdict:
    """Check that ``V = U^inv`` has order ``1/rho`` in M0 with ``L(y) = b(V(y))/V(y)``.

    The y-grid is geometric with the ratio and length of ``grid``, starting
    at ``max(grid.x0, U(domain_start))``.

    Raises
    ------
    HypothesisFailed
        When ``b U'/U`` does not converge to ``rho`` on the grid (the
        transfer is then unverifiable, not false).
    """
    if not rho > 0:
        raise ValueError("the inverse transfer needs rho > 0")
    Uf = PositiveFunction.coerce(U)
    bf = PositiveFunction.coerce(b)
    crit = check_derivative_criterion(Uf, NormalizerSpec.sn(b, grid.x0), grid)
    if not (crit.converged and abs(crit.value - rho) <= max(tol, crit.uncertainty)):
        raise HypothesisFailed(f"b U'/U -> {crit.value:.6g} (converged={crit.converged}), "
                               f"not rho = {rho:g}")
    start = grid.x0 if domain_start is None else domain_start
    inv = InverseFn(Uf, start)
    l_start = float(np.atleast_1d(inv.log_value(np.array([start])))[0])
    y0 = max(grid.x0, math.exp(l_start)) if l_start < 700 else math.inf
    if not math.isfinite(y0):
        raise NotBracketed("U(domain_start) overflows; choose a smaller domain_start")
    ygrid = Grid(y0, grid.ratio, grid.steps)

    # both take log y, so that y may lie beyond the float range
    def log_V(log_y):
        return np.log(numeric_inverse(inv, log_y=log_y))

    def log_L(log_y):
        v = numeric_inverse(inv, log_y=log_y)
        return bf.log(v) - np.log(v)

    V = PositiveFunction.from_log_map(log_V, label=f"inverse[{Uf.label}]")
    L = PositiveFunction.from_log_map(log_L, label="b(V)/V")
    verdict = check_assumption(L, y0, ygrid)
    est = estimate_order_weighted(V, L, y0, ygrid, assumption=verdict)
    member = math.isfinite(est.rho) and abs(est.rho - 1.0 / rho) <= tol
    notes = [f"order of the inverse {est.rho:.6g}, expected {1.0 / rho:.6g}",
             f"b U'/U -> {crit.value:.6g}"]
    return ClassVerdict(member, est, False, None, notes,
                        {"derivative_limit": crit, "V": V, "L": L, "y_grid": ygrid,
                         "assumption": verdict})
