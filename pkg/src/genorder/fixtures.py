"""Catalogue of worked examples with known classes and orders.

Each entry records the function, its normalizer, the class, the order and
the tolerance within which the estimator is expected to reproduce it on
the default grid (``x0 = 10``, ratio 2, 40 points).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .functions import NormalizerSpec

E = math.e


@dataclass(frozen=True)
class Fixture:
    """A worked example.

    ``rho`` is None for functions without an order (only O-type bounds,
    given in ``bounds``). ``family`` is the general form the entry
    instantiates.
    """

    name: str
    expr: str
    class_id: str
    norm_expr: Optional[str]
    anchor: float
    rho: Optional[float]
    tol: float
    family: str
    note: str = ""
    bounds: Optional[Tuple[float, float]] = None
    tags: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def normalizer(self) -> NormalizerSpec:
        if self.class_id == "M":
            return NormalizerSpec.log()
        if self.class_id in ("M0", "M0plus"):
            return NormalizerSpec.weighted(self.norm_expr, self.anchor)
        if self.class_id == "M0minus":
            return NormalizerSpec.tail(self.norm_expr, self.anchor)
        return NormalizerSpec.sn(self.norm_expr, self.anchor)

    def as_dict(self) -> Dict[str, object]:
        kind = {"M": None, "M1": "b"}.get(self.class_id, "L")
        return {"name": self.name, "expr": self.expr, "class": self.class_id,
                "normalizer": None if kind is None else f"{kind} = {self.norm_expr}",
                "anchor": self.anchor, "rho": self.rho, "tol": self.tol,
                "family": self.family, "note": self.note,
                "bounds": list(self.bounds) if self.bounds else None}


FIXTURES: List[Fixture] = [
    Fixture("log-power", "(log(x))^2", "M0", "1/log(x)", E, 2.0, 1e-6,
            "U = (log x)^rho, L = 1/log x, rho = 2", "ratio exactly rho",
            tags=("m0", "monotone")),
    Fixture("de-haan-log", "log(x)", "M0", "1/log(x)", E, 1.0, 1e-6,
            "U = log x (de Haan class), L = 1/log x", tags=("m0", "monotone")),
    Fixture("exp-sqrt-log", "exp(3*log(x)^0.5)", "M", None, 1.0, 0.0, 0.05,
            "U = exp(rho (log x)^beta), beta = 1/2, order in M",
            "slow limit: ratio 3/sqrt(log x)"),
    Fixture("exp-sqrt-log-m0", "exp(3*log(x)^0.5)", "M0", "0.5*log(x)^-0.5", 1.0, 3.0, 0.02,
            "U = exp(rho (log x)^beta), L = beta (log x)^(beta-1), beta = 1/2",
            tags=("m0", "monotone")),
    Fixture("exp-inv-log", "exp(-log(x)^-1)", "M0minus", "log(x)^-2", E, -1.0, 1e-6,
            "U = exp(rho (log x)^beta), L = -beta (log x)^(beta-1), beta = -1",
            "tail integral 1/log x", tags=("m0minus",)),
    Fixture("exp-inv-square", "exp(5*x^-2)", "M0minus", "2*x^-2", 1.0, 5.0, 1e-6,
            "U = exp(rho x^-alpha), L = alpha x^-alpha, alpha = 2", "tail integral x^-2",
            tags=("m0minus",)),
    Fixture("exp-sqrt", "exp(2*x^0.5)", "M0plus", "0.5*x^0.5", 1.0, 2.0, 1e-3,
            "U = exp(rho x^alpha), L = alpha x^alpha, alpha = 1/2", tags=("m0plus", "monotone")),
    Fixture("exponential-density", "0.5*exp(-0.5*x)", "M1", "1", 0.0, -0.5, 1e-3,
            "U = alpha exp(-alpha x), b = 1", tags=("m1", "gamma_minus")),
    Fixture("normal-density", "exp(-x^2/2)/sqrt(2*pi)", "M1", "1/x", 1.0, -1.0, 1e-3,
            "standard normal density, b = 1/x",
            "int_a^x t dt = x^2/2, so log U / int 1/b -> -1", tags=("m1", "gamma_minus")),
    Fixture("floor-power", "exp(floor(x)*log(x))", "M1", "1/log(x)", 1.0, 1.0, 0.02,
            "U = exp([x] log x), 1/b = log x", "not in Gamma(b)", tags=("m1",)),
    Fixture("sine-tail", "exp(-x-0.5*sin(x))", "M1", "1", 0.0, -1.0, 1e-3,
            "tail distribution exp(-x - 0.5 sin x), b = 1", tags=("m1",)),
    Fixture("square-cos", "exp(x^2+cos(x))", "M1", "1/(2*x)", 1.0, 1.0, 1e-3,
            "U = exp(x^2 + cos x), b = 1/(2x)", tags=("m1",)),
    Fixture("power-log", "x^3*log(x)", "M", None, 1.0, 3.0, 0.05,
            "U = x^3 log x, order in M"),
    Fixture("cos-log-exponent", "exp(x*(2+cos(log(x))))", "M1", "1", 0.0, None, 0.1,
            "U = exp(x (2 + cos log x)), b = 1", "no order; O-type bounds [1, 3]",
            bounds=(1.0, 3.0)),
]


def get(name: str) -> Fixture:
    for f in FIXTURES:
        if f.name == name:
            return f
    raise KeyError(f"unknown fixture {name!r}")


def tagged(tag: str) -> List[Fixture]:
    return [f for f in FIXTURES if tag in f.tags]
