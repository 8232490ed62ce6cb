"""Log-space views of the functions U, L and b, and of their normalizers.

Every estimator in the package works with ``log U`` rather than ``U`` so
that functions such as ``exp(2*sqrt(x))`` can be sampled at ``x = 1e12``.
:class:`PositiveFunction` wraps an expression, a plain callable, a callable
returning logarithms, or a table, behind one interface.
:class:`Normalizer` tabulates ``H(x) = int_a^x L(t)/t dt`` (or its tail or
``b``-version) on a grid and evaluates it between grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional

import numpy as np

from . import expr as ex
from .errors import DepthExceeded, DomainError, NonPositive, TailVanished
from .numerics import RELATIVE_QUAD, Grid, QuadConfig, integrate_finite, integrate_to_infinity

# Gauss-Legendre rule used for sub-panel integrals between grid points
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def gauss_legendre(f: Callable, lo, hi):
    """20-point Gauss-Legendre integral of ``f`` over ``[lo, hi]``.

    ``lo`` and ``hi`` may be arrays of the same shape; ``f`` is called once
    with an array of shape ``lo.shape + (20,)``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[..., None] + half[..., None] * _GL_X
    return half * np.sum(f(nodes) * _GL_W, axis=-1)


def log_nonnegative(f: "PositiveFunction", x):
    """``log f(x)`` with ``-inf`` where f vanishes; negative values are an error."""
    if f.expr is not None:
        sign, mag = ex.log_eval(f.expr, x)
        if np.any(np.asarray(sign) < 0):
            raise DomainError(f"{f.label} is negative at some sample point")
        return np.where(np.asarray(sign) == 0, -np.inf, mag)
    return f.log(x)


class PositiveFunction:
    """A positive function accessed through its logarithm.

    Parameters
    ----------
    source : Expr, str, number or callable
        Expression (text is parsed) or a callable returning function values.
    log_callable : callable, optional
        Callable returning ``log f(x)``; use instead of ``source`` when the
        values themselves overflow.
    label : str, optional
        Name used in messages and reports.
    """

    def __init__(self, source=None, *, log_callable: Optional[Callable] = None,
                 label: Optional[str] = None):
        if (source is None) == (log_callable is None):
            raise TypeError("give exactly one of source or log_callable")
        self.expr: Optional[ex.Expr] = None
        self._fn = None
        self._logfn = log_callable
        self._dlog = None
        if source is not None:
            if callable(source) and not isinstance(source, ex.Expr):
                self._fn = source
            else:
                self.expr = ex.as_expr(source)
        if label is None:
            label = ex.to_string(self.expr) if self.expr is not None else getattr(
                source if source is not None else log_callable, "__name__", "<function>")
        self.label = label

    @classmethod
    def coerce(cls, value) -> "PositiveFunction":
        return value if isinstance(value, PositiveFunction) else cls(value)

    @classmethod
    def from_table(cls, x, log_values, label: str = "<table>") -> "PositiveFunction":
        """Piecewise-linear interpolation of ``log f`` against ``log x``.

        Outside the table the end segments are extended linearly, which keeps
        the interpolant exact on pure powers.
        """
        lx = np.log(np.asarray(x, dtype=float))
        ly = np.asarray(log_values, dtype=float)
        if lx.ndim != 1 or lx.shape != ly.shape or len(lx) < 2:
            raise ValueError("table needs matching 1-d arrays of length >= 2")
        if np.any(np.diff(lx) <= 0):
            raise ValueError("table abscissae must be increasing")
        slope_lo = (ly[1] - ly[0]) / (lx[1] - lx[0])
        slope_hi = (ly[-1] - ly[-2]) / (lx[-1] - lx[-2])

        def log_at(u):
            u = np.asarray(u, dtype=float)
            out = np.interp(u, lx, ly)
            out = np.where(u < lx[0], ly[0] + slope_lo * (u - lx[0]), out)
            return np.where(u > lx[-1], ly[-1] + slope_hi * (u - lx[-1]), out)

        return cls.from_log_map(log_at, label)

    @classmethod
    def from_log_map(cls, log_at: Callable, label: str = "<function>") -> "PositiveFunction":
        """Function given by ``log_at(log x) = log f(x)``.

        Useful when ``x`` itself may overflow (arguments beyond ``exp(709)``).
        """
        f = cls(log_callable=lambda x: log_at(np.log(x)), label=label)
        f._log_map = log_at
        return f

    @property
    def symbolic(self) -> bool:
        return self.expr is not None

    @property
    def has_floor(self) -> bool:
        return self.expr is not None and ex.contains(self.expr, "floor")

    def log(self, x=None, *, log_x=None):
        """``log f`` at ``x`` (or at ``exp(log_x)``); raises NonPositive if f <= 0."""
        if (x is None) == (log_x is None):
            raise TypeError("give exactly one of x or log_x")
        if self.expr is not None:
            sign, mag = ex.log_eval(self.expr, x, log_x=log_x)
            if np.any(np.asarray(sign) <= 0):
                raise NonPositive(f"{self.label} is not positive at some sample point")
            return mag
        log_map = getattr(self, "_log_map", None)
        if log_map is not None and log_x is not None:
            return log_map(log_x)
        xv = np.exp(log_x) if x is None else x
        if self._logfn is not None:
            out = np.asarray(self._logfn(xv), dtype=float)
        else:
            vals = np.asarray(self._fn(xv), dtype=float)
            if np.any(~np.isfinite(vals)):
                raise DomainError(f"{self.label} is not finite at some sample point")
            if np.any(vals <= 0):
                raise NonPositive(f"{self.label} is not positive at some sample point")
            out = np.log(vals)
        if np.any(np.isnan(out)):
            raise DomainError(f"{self.label} is undefined at some sample point")
        return out if np.ndim(out) else float(out)

    def __call__(self, x):
        return np.exp(self.log(x))

    def log_derivative(self, x):
        """``(log f)'(x)``; symbolic when possible, else a central difference."""
        x = np.asarray(x, dtype=float)
        if self.expr is not None:
            if self._dlog is None:
                self._dlog = ex.log_derivative(self.expr)
            sd, ld = ex.log_eval(self._dlog, x)
            return sd * np.exp(ld)
        h = 1e-5 * np.maximum(np.abs(x), 1.0)
        return (self.log(x + h) - self.log(x - h)) / (2 * h)

    def log_increment(self, x, h):
        """``log f(x + h) - log f(x)`` for arrays ``x`` and ``h`` (broadcast).

        For smooth expressions the increment is computed as
        ``h * int_0^1 (log f)'(x + s*h) ds`` so that it stays accurate when
        ``h`` is far below the spacing of doubles near ``x``.
        """
        x = np.asarray(x, dtype=float)
        h = np.asarray(h, dtype=float)
        if self.expr is None or self.has_floor:
            return self.log(x + h) - self.log(x)
        x, h = np.broadcast_arrays(x, h)
        nodes = 0.5 * (_GL_X + 1.0)
        pts = x[..., None] + h[..., None] * nodes
        d = self.log_derivative(pts)
        return h * np.sum(d * 0.5 * _GL_W, axis=-1)

    def __repr__(self):
        return f"PositiveFunction({self.label!r})"


# ---------------------------------------------------------------- normalizers


class NormalizerKind(str, Enum):
    LOG = "log"            # H(x) = log x
    WEIGHTED = "weighted"  # H(x) = int_a^x L(t)/t dt
    TAIL = "tail"          # T(x) = int_x^inf L(t)/t dt
    SN_B = "b"             # H(x) = int_a^x 1/b(t) dt


@dataclass(frozen=True)
class NormalizerSpec:
    """The normalizing data of an order ratio.

    ``expr`` holds L (weighted and tail kinds) or b (``b`` kind) as an
    expression or a callable, and is absent for the log kind.
    """

    kind: NormalizerKind
    expr: Optional[object] = None
    anchor: float = 1.0

    def __post_init__(self):
        kind = NormalizerKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is NormalizerKind.LOG:
            if self.expr is not None:
                raise ValueError("the log normalizer takes no expression")
        else:
            if self.expr is None:
                raise ValueError(f"normalizer kind {kind.value!r} needs an expression")
            if isinstance(self.expr, (str, int, float)):
                object.__setattr__(self, "expr", ex.as_expr(self.expr))
        if not math.isfinite(self.anchor):
            raise ValueError("anchor must be finite")

    @classmethod
    def log(cls):
        return cls(NormalizerKind.LOG)

    @classmethod
    def weighted(cls, L, anchor: float = 1.0):
        return cls(NormalizerKind.WEIGHTED, L, anchor)

    @classmethod
    def tail(cls, L, anchor: float = 1.0):
        return cls(NormalizerKind.TAIL, L, anchor)

    @classmethod
    def sn(cls, b, anchor: float = 1.0):
        return cls(NormalizerKind.SN_B, b, anchor)

    @property
    def text(self) -> Optional[str]:
        if self.expr is None:
            return None
        if isinstance(self.expr, ex.Expr):
            return ex.to_string(self.expr)
        return getattr(self.expr, "label", getattr(self.expr, "__name__", "<function>"))


class Normalizer:
    """Tabulated normalizer of an order ratio on a grid.

    ``values`` holds ``H(x_k)`` (``T(x_k)`` for the tail kind). Integrals
    are computed in the variable ``u = log t``, where the integrands
    ``L(e^u)`` and ``e^u / b(e^u)`` are smooth and panels between grid
    points have constant width.

    If the anchor is outside the domain of the integrand, or the integral
    from the anchor does not exist, the anchor is moved to the first grid
    point where the integral can be formed and a warning is recorded.
    """

    def __init__(self, spec: NormalizerSpec, grid: Grid, cfg: QuadConfig = RELATIVE_QUAD):
        self.spec = spec
        self.kind = spec.kind
        self.grid = grid
        self.cfg = cfg
        self.warnings: List[str] = []
        self.x = grid.points
        self.u = grid.log_points
        self.func = None if spec.expr is None else PositiveFunction.coerce(spec.expr)
        self.anchor = spec.anchor
        if self.kind is NormalizerKind.LOG:
            self.values = self.u.copy()
        elif self.kind is NormalizerKind.TAIL:
            self.values = self._tail_table()
        else:
            self.values = self._cumulative_table()

    # integrand of dH/du; the tail kind uses the same density with dT/du = -density
    def density(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind is NormalizerKind.LOG:
            return np.ones_like(u)
        if self.kind is NormalizerKind.SN_B:
            return np.exp(u - self.func.log(log_x=u))
        return np.exp(self.func.log(log_x=u))

    def density_t(self, t):
        """Integrand in the original variable: L(t)/t or 1/b(t)."""
        t = np.asarray(t, dtype=float)
        if self.kind is NormalizerKind.LOG:
            return 1.0 / t
        if self.kind is NormalizerKind.SN_B:
            return np.exp(-self.func.log(t))
        return np.exp(self.func.log(t)) / t

    def _head(self, a, x0):
        """int_a^x0 of the integrand; DomainError/DepthExceeded bubble up."""
        if a == x0:
            return 0.0
        if a > 0:
            return integrate_finite(self.density, math.log(a), math.log(x0), self.cfg)
        return integrate_finite(self.density_t, a, x0, self.cfg)

    def _cumulative_table(self):
        x0 = float(self.x[0])
        if self.anchor > x0:
            raise ValueError(f"anchor {self.anchor} lies beyond the first grid point {x0}")
        panels = [integrate_finite(self.density, lo, hi, self.cfg)
                  for lo, hi in zip(self.u[:-1], self.u[1:])]
        try:
            head = self._head(self.anchor, x0)
        except (DomainError, DepthExceeded, ZeroDivisionError) as err:
            self.warnings.append(
                f"anchor {self.anchor:g} unusable for {self.spec.text} ({err}); "
                f"moved to first grid point {x0:g}")
            self.anchor = x0
            head = 0.0
        return head + np.concatenate([[0.0], np.cumsum(panels)])

    def _tail_table(self):
        # panels between grid points plus the integral beyond the last one
        panels = [integrate_finite(self.density, lo, hi, self.cfg)
                  for lo, hi in zip(self.u[:-1], self.u[1:])]
        last = integrate_to_infinity(self.density, float(self.u[-1]), self.cfg)
        if not math.isfinite(last):
            raise TailVanished(f"tail integral of {self.spec.text} diverges")
        tail = last + np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]])
        if np.any(tail <= np.finfo(float).tiny):
            raise TailVanished(f"tail integral of {self.spec.text} underflows on the grid")
        return tail

    def at_log(self, u):
        """Normalizer at arbitrary log-abscissae ``u >= log x0``."""
        u = np.asarray(u, dtype=float)
        if np.any(u < self.u[0] - 1e-12):
            raise ValueError("normalizer requested below the first grid point")
        if self.kind is NormalizerKind.LOG:
            return u.copy()
        if self.kind is NormalizerKind.TAIL:
            # from the grid point above (or the tail integral beyond the grid)
            k = np.searchsorted(self.u, u, side="left")
            inside = k < len(self.u)
            kk = np.minimum(k, len(self.u) - 1)
            out = np.empty_like(u)
            upper = np.where(inside, self.u[kk], u)
            out = np.where(inside, self.values[kk], 0.0) + gauss_legendre(self.density, u, upper)
            if np.any(~inside):
                for i in np.flatnonzero(~inside):
                    out.flat[i] = integrate_to_infinity(self.density, float(u.flat[i]), self.cfg)
            return out
        k = np.clip(np.searchsorted(self.u, u, side="right") - 1, 0, len(self.u) - 1)
        return self.values[k] + gauss_legendre(self.density, self.u[k], u)
