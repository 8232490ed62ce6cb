"""Quadrature and limit extrapolation on geometric grids.

Every ``x -> infinity`` limit in the package is evaluated on a geometric
grid ``x_k = x0 * r**k`` and handed to :func:`extrapolate_limit`; every
normalizing integral goes through :func:`integrate_finite`,
:func:`integrate_to_infinity` or :func:`cumulative_integral`.

A divergent improper integral is reported as ``+inf``/``-inf`` rather than
raised, because divergence is the expected outcome for many normalizers.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DepthExceeded, DomainError, TooFewPoints

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5]] = _WG[:3]
_WG15[7] = _WG[3]
_WG15[[13, 11, 9]] = _WG[:3]
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Grid:
    """Geometric abscissae ``x_k = x0 * ratio**k`` for ``k = 0 .. steps-1``."""

    x0: float = 10.0
    ratio: float = 2.0
    steps: int = 40

    def __post_init__(self):
        if not self.x0 > 0:
            raise ValueError("Grid.x0 must be positive")
        if not self.ratio > 1:
            raise ValueError("Grid.ratio must exceed 1")
        if int(self.steps) != self.steps or self.steps < 8:
            raise ValueError("Grid.steps must be an integer >= 8")

    @property
    def points(self) -> np.ndarray:
        return self.x0 * self.ratio ** np.arange(self.steps, dtype=float)

    @property
    def log_points(self) -> np.ndarray:
        return math.log(self.x0) + math.log(self.ratio) * np.arange(self.steps, dtype=float)


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_depth: int = 48
    divergence_bound: float = 1e12

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_depth < 10:
            raise ValueError("max_depth must be at least 10")


DEFAULT_QUAD = QuadConfig()
# Integrals whose magnitude is unknown in advance (tails like x**-2 at x=1e12)
# are controlled by the relative tolerance only.
RELATIVE_QUAD = QuadConfig(abs_tol=1e-300, rel_tol=1e-11, max_depth=60)


@dataclass
class LimitEstimate:
    """Numerical stand-in for ``lim y(x)`` as ``x -> infinity``.

    ``uncertainty`` is the self-consistency residual of the chosen
    extrapolant; ``tail_min``/``tail_max`` bound the raw last-quartile values
    (widened to include ``value`` when the limit converged).
    """

    value: float
    uncertainty: float
    converged: bool
    oscillatory: bool
    tail_min: float
    tail_max: float
    method: str = "aitken"

    @property
    def diverges(self) -> bool:
        return math.isinf(self.value)


def _as_vectorized(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def g(t):
        try:
            out = f(t)
        except (TypeError, ValueError):
            out = None
        if out is None or np.shape(out) != np.shape(t):
            out = np.array([f(float(ti)) for ti in np.ravel(t)], dtype=float).reshape(np.shape(t))
        return np.asarray(out, dtype=float)

    return g


def _gk15(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fv = f(c + h * _NODES)
    if not np.all(np.isfinite(fv)):
        raise DomainError(f"integrand is not finite on [{a!r}, {b!r}]")
    resk = np.dot(_WK, fv)
    resg = np.dot(_WG15, fv)
    reskh = 0.5 * resk
    resabs = abs(h) * np.dot(_WK, np.abs(fv))
    resasc = abs(h) * np.dot(_WK, np.abs(fv - reskh))
    err = abs((resk - resg) * h)
    if resasc != 0 and err != 0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(50 * _EPS * resabs, err)
    return resk * h, err


def _adaptive(g, a, b, cfg):
    val, err = _gk15(g, a, b)
    heap = [(-err, a, b, val, err, 0)]
    total, total_err = val, err
    n_intervals = 1
    while total_err > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        _, lo, hi, v, e, depth = heapq.heappop(heap)
        if depth >= cfg.max_depth or n_intervals > 50_000:
            raise DepthExceeded(
                f"no convergence on [{a!r}, {b!r}]: error {total_err:.3g} at depth {depth}"
            )
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise DepthExceeded(f"interval [{lo!r}, {hi!r}] cannot be bisected further")
        v1, e1 = _gk15(g, lo, mid)
        v2, e2 = _gk15(g, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1, e1, depth + 1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2, depth + 1))
        n_intervals += 1
        total += v1 + v2 - v
        total_err += e1 + e2 - e
        if total_err < 0 or n_intervals % 64 == 0:
            total = math.fsum(item[3] for item in heap)
            total_err = math.fsum(item[4] for item in heap)
    return float(math.fsum(item[3] for item in heap))


def integrate_finite(f: Callable, a: float, b: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Adaptive Gauss-Kronrod (7/15) quadrature of ``f`` over ``[a, b]``.

    ``f`` should accept a numpy array; scalar-only callables are wrapped.
    The interval with the largest error estimate is bisected until the total
    estimated error is below ``max(abs_tol, rel_tol * |value|)``. If that
    fails, the integral is retried after the substitution
    ``t = a + (b - a) * (3u**2 - 2u**3)``, whose Jacobian vanishes at both
    ends and absorbs integrable endpoint singularities such as ``t**-0.5``.

    Raises
    ------
    DepthExceeded
        When refinement would go deeper than ``cfg.max_depth`` bisections.
    """
    if a == b:
        return 0.0
    if not a < b:
        raise ValueError("integrate_finite requires a < b")
    g = _as_vectorized(f)
    try:
        return _adaptive(g, a, b, cfg)
    except DepthExceeded:
        width = b - a

        def smoothed(u):
            return g(a + width * u * u * (3.0 - 2.0 * u)) * (6.0 * width) * u * (1.0 - u)

        return _adaptive(smoothed, 0.0, 1.0, cfg)


def _aitken(s0, s1, s2):
    """Aitken's delta-squared extrapolant of three consecutive terms."""
    d1 = s1 - s0
    d2 = s2 - s1
    den = d2 - d1
    if den == 0:
        return s2
    return s2 - d2 * d2 / den


_LOG_SWITCH = 16.0  # five doublings in log t end at t = exp(512), far from overflow


def _geometric_tail(total, terms, tol):
    # the last panel is small and the panels shrink fast enough
    p = terms[-1]
    if p == 0:
        return True
    if len(terms) < 2 or abs(p) >= tol:
        return False
    prev = abs(terms[-2])
    if prev == 0 or abs(p) >= prev:
        return False
    q = abs(p) / prev
    return abs(p) * q / (1 - q) < tol


def integrate_to_infinity(f: Callable, a: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Integral of ``f`` over ``[a, inf)``; returns ``+-inf`` when divergent.

    Panels ``[a*2**j, a*2**(j+1)]`` are summed until a panel contributes less
    than the tolerance and the geometric tail bound is below it too.
    Divergence is declared when the running sum exceeds
    ``cfg.divergence_bound`` or when 16 consecutive panels fail to decrease.

    Tails that decay only like a power of ``log t`` never meet that test.
    Beyond ``t = exp(16)`` the integral continues in ``u = log t`` over
    panels ``[u, 2u]``, on which such tails shrink geometrically. Panels
    that stop shrinking mean divergence; otherwise the partial sums are
    accelerated with Aitken's delta-squared process.
    """
    g = _as_vectorized(f)
    total = 0.0
    if a <= 0:
        total = integrate_finite(g, a, 1.0, cfg)
        a = 1.0
    terms = []
    lo = a
    while math.log(lo) < _LOG_SWITCH:
        hi = min(2.0 * lo, math.exp(_LOG_SWITCH))
        p = integrate_finite(g, lo, hi, cfg)
        terms.append(p)
        total += p
        if abs(total) > cfg.divergence_bound:
            return math.copysign(math.inf, total)
        if len(terms) >= 17:
            last = np.abs(terms[-17:])
            if np.all(np.diff(last) >= 0) and last[-1] > 0:
                return math.copysign(math.inf, total)
        if _geometric_tail(total, terms, max(cfg.abs_tol, cfg.rel_tol * abs(total))):
            return total
        lo = hi

    def in_log(u):
        t = np.exp(u)
        return g(t) * t

    u = math.log(lo)
    terms = []
    partial = []
    while 2.0 * u <= 512.0 * (1 + 1e-12):
        p = integrate_finite(in_log, u, 2.0 * u, cfg)
        terms.append(p)
        total += p
        partial.append(total)
        if abs(total) > cfg.divergence_bound:
            return math.copysign(math.inf, total)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if _geometric_tail(total, terms, tol):
            return total
        if len(terms) >= 2 and abs(terms[-1]) >= 0.999 * abs(terms[-2]) and terms[-1] != 0:
            return math.copysign(math.inf, total)
        u *= 2.0
    if len(partial) >= 3:
        d1 = partial[-1] - partial[-2]
        d0 = partial[-2] - partial[-3]
        if d0 != 0 and 0 <= d1 / d0 < 1:
            return float(_aitken(partial[-3], partial[-2], partial[-1]))
    return total


def cumulative_integral(f: Callable, a: float, grid: Grid, cfg: QuadConfig = DEFAULT_QUAD):
    """Tabulate ``H(x_k) = integral of f over [a, x_k]`` on a grid.

    Each panel between consecutive abscissae is integrated once and the
    running sum is assembled in fixed panel order. Returns ``(x, H)``.
    """
    xs = grid.points
    if xs[0] < a:
        raise ValueError("grid must start at or after the lower limit a")
    g = _as_vectorized(f)
    edges = np.concatenate([[a], xs])
    panels = np.array([integrate_finite(g, lo, hi, cfg) for lo, hi in zip(edges[:-1], edges[1:])])
    return xs, np.cumsum(panels)


# ---------------------------------------------------------------- limits

_FIT_P_GRID = np.concatenate([np.linspace(-3.0, -0.05, 30), np.geomspace(0.02, 12.0, 120)])


def _profile_fit(s, y, with_log=False):
    """Least-squares fit of ``y = rho + s**(-p) * (c1 + c2*log s)``.

    The amplitudes enter linearly and are profiled out, leaving a 1-d
    search over ``p``. ``with_log=False`` drops the ``c2`` term. Returns
    ``(rho, p, rms)``.
    """
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    u = s / s[-1]
    lu = np.log(u)
    ys = np.max(np.abs(y)) or 1.0
    yn = y / ys

    def solve(p):
        basis = u ** (-p)
        cols = [np.ones_like(u), basis]
        if with_log:
            cols.append(basis * lu)
        A = np.column_stack(cols)
        coef, *_ = np.linalg.lstsq(A, yn, rcond=None)
        r = A @ coef - yn
        return coef, float(np.dot(r, r))

    rss = np.array([solve(p)[1] for p in _FIT_P_GRID])
    i = int(np.argmin(rss))
    lo = _FIT_P_GRID[max(i - 1, 0)]
    hi = _FIT_P_GRID[min(i + 1, len(_FIT_P_GRID) - 1)]
    best_p, best_rss = float(_FIT_P_GRID[i]), float(rss[i])
    if hi > lo:
        res = minimize_scalar(lambda p: solve(p)[1], bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        if res.fun <= best_rss:
            best_p, best_rss = float(res.x), float(res.fun)
    coef, rss_best = solve(best_p)
    return float(coef[0] * ys), best_p, math.sqrt(rss_best / len(y)) * ys


def _poly_fit(s, y):
    """Least-squares fit of ``y = rho + c1/s + c2/s**2``; returns ``(rho, rms)``."""
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    v = s[-1] / s
    A = np.column_stack([np.ones_like(v), v, v * v])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    r = A @ coef - y
    return float(coef[0]), math.sqrt(float(np.dot(r, r)) / len(y))


def extrapolate_limit(values: Sequence, scale: Optional[Sequence] = None) -> LimitEstimate:
    """Estimate ``lim y_k`` from samples ``(x_k, y_k)`` on a geometric grid.

    Three extrapolants compete:

    * Aitken's delta-squared process, exact for ``rho + c*q**k``;
    * a fit ``rho + c * s**(-p)`` on the last half of the data, where ``s``
      is ``log x`` (affine in the grid index) and, when given, also the
      ``scale`` values (the order estimators pass their normalizer);
    * the same fit with an extra ``s**(-p) * log s`` term, which captures
      corrections like ``log log x / log x``;
    * ``rho + c1/s + c2/s**2`` with fixed exponents, the shape of
      ``log U = rho*s + c + o(1)``, which a free exponent tends to miss when
      the remainder is not a pure power.

    Each is scored by a self-consistency residual: Aitken against Aitken on
    samples ``K/8`` apart (both exact for geometric convergence, but they
    disagree on logarithmic convergence such as ``1/k``), fits against the same fit on a window shifted two
    samples back (plus the fit rms). The smallest residual wins. A
    monotone tail whose fits all find an exponent ``p < 0.05`` (in every
    variable) is reported as divergent, with ``value = +-inf``.
    """
    pts = np.asarray(values, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("values must be a sequence of (x, y) pairs")
    x, y = pts[:, 0], pts[:, 1]
    K = len(y)
    if K < 8:
        raise TooFewPoints(f"need at least 8 points, got {K}")
    if not np.all(np.isfinite(y)):
        raise DomainError("non-finite values in limit sequence")

    q_len = max(K // 4, 2)
    tail = y[-q_len:]
    tail_min, tail_max = float(tail.min()), float(tail.max())
    spread = tail_max - tail_min
    d = np.diff(y)
    dq = d[-(q_len - 1):]
    nz = dq[dq != 0]
    sign_changes = int(np.sum(np.sign(nz[1:]) != np.sign(nz[:-1]))) if len(nz) > 1 else 0
    h = K // 2
    monotone_tail = bool(np.all(d[-h:] > 0) or np.all(d[-h:] < 0))
    # change over the last half, relative to the magnitude of the values
    moving = abs(y[-1] - y[-h]) > 1e-6 * max(1.0, float(np.max(np.abs(y[-h:]))))

    candidates = []
    if d[-1] == 0 and d[-2] == 0:
        candidates.append((0.0, float(y[-1]), "aitken"))
    else:
        qs = d[-4:][1:] / np.where(d[-4:][:-1] == 0, np.nan, d[-4:][:-1])
        if np.all(np.isfinite(qs)) and np.all(np.abs(qs) < 0.98):
            m = max(2, K // 8)
            a_full = _aitken(y[-3], y[-2], y[-1])
            a_sub = _aitken(y[-1 - 2 * m], y[-1 - m], y[-1])
            if math.isfinite(a_full) and math.isfinite(a_sub):
                candidates.append((abs(a_full - a_sub), float(a_full), "aitken"))

    # divergence needs every fit variable to agree
    verdicts = []
    variables = [("", np.log(x))]
    if scale is not None:
        variables.append(("@scale", np.asarray(scale, dtype=float)))
    for tag, s in variables:
        if not (np.all(s[-h - 2:] > 0) and moving):
            continue
        n_divergent = n_fits = 0
        for with_log in (False, True):
            try:
                rho1, p1, rms1 = _profile_fit(s[-h:], y[-h:], with_log)
                rho2, p2, _ = _profile_fit(s[-h - 2:-2], y[-h - 2:-2], with_log)
            except (np.linalg.LinAlgError, ValueError):
                continue
            n_fits += 1
            if p1 < 0.05:
                n_divergent += 1
                continue
            if math.isfinite(rho1) and math.isfinite(rho2):
                name = ("fit-log" if with_log else "fit") + tag
                candidates.append((abs(rho1 - rho2) + rms1, float(rho1), name))
        diverging = monotone_tail and n_fits > 0 and n_divergent == n_fits
        verdicts.append(diverging)
        if not diverging:
            rho1, rms1 = _poly_fit(s[-h:], y[-h:])
            rho2, _ = _poly_fit(s[-h - 2:-2], y[-h - 2:-2])
            candidates.append((abs(rho1 - rho2) + rms1, rho1, "poly" + tag))
    fit_diverges = math.copysign(1.0, d[-1]) if verdicts and all(verdicts) else None

    # an Aitken value survives a divergent-looking fit only when it is exact
    exact = 1e-8 * max(1.0, float(np.max(np.abs(y[-h:]))))
    if fit_diverges is not None and not any(c[2] == "aitken" and c[0] < exact for c in candidates):
        return LimitEstimate(math.copysign(math.inf, fit_diverges), math.inf, False, False,
                             tail_min, tail_max, "divergent")
    if not candidates:
        if monotone_tail and moving and abs(d[-1]) >= abs(d[-2]) > 0:
            return LimitEstimate(math.copysign(math.inf, d[-1]), math.inf, False, False,
                                 tail_min, tail_max, "divergent")
        value = 0.5 * (tail_min + tail_max)
        residual = 0.5 * spread
        method = "midpoint"
    else:
        residual, value, method = min(candidates, key=lambda c: c[0])

    scale_v = max(1.0, abs(value))
    tol = 1e-3 * scale_v
    oscillatory = sign_changes >= 4 and spread > tol
    converged = residual < tol and spread < 10 * tol and not oscillatory
    if converged:
        tail_min = min(tail_min, value)
        tail_max = max(tail_max, value)
    return LimitEstimate(float(value), float(residual), bool(converged), bool(oscillatory),
                         tail_min, tail_max, method)
