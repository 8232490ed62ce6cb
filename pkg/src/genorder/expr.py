"""Single-variable real expressions: parsing, printing, evaluation, derivatives.

Grammar (lowest to highest precedence)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" unary)?          # right associative
    primary := number | "x" | "pi" | "e" | func "(" expr ")" | "(" expr ")"
    func    := log | exp | sqrt | sin | cos | abs | floor

``-x^2`` therefore means ``-(x^2)`` and ``2^3^2`` means ``2^(3^2)``.
Implicit multiplication (``2x``) is rejected.

Two evaluators are provided. :func:`evaluate` computes plain IEEE values.
:func:`log_eval` propagates ``(sign, log|value|)`` pairs through the tree so
that functions such as ``exp(2*x^0.5)`` can be handled at ``x = 1e12`` where
the value itself overflows; the abscissa may also be supplied as ``log x``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ParseError

FUNCTIONS = ("log", "exp", "sqrt", "sin", "cos", "abs", "floor")
CONSTANTS = {"pi": math.pi, "e": math.e}
BINARY_OPS = ("+", "-", "*", "/", "^")


class Expr:
    """Base class of expression nodes. Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self):
        return to_string(self)

    # light operator sugar for building trees in code
    def __add__(self, other):
        return Binary("+", self, _coerce(other))

    def __radd__(self, other):
        return Binary("+", _coerce(other), self)

    def __sub__(self, other):
        return Binary("-", self, _coerce(other))

    def __rsub__(self, other):
        return Binary("-", _coerce(other), self)

    def __mul__(self, other):
        return Binary("*", self, _coerce(other))

    def __rmul__(self, other):
        return Binary("*", _coerce(other), self)

    def __truediv__(self, other):
        return Binary("/", self, _coerce(other))

    def __rtruediv__(self, other):
        return Binary("/", _coerce(other), self)

    def __pow__(self, other):
        return Binary("^", self, _coerce(other))

    def __neg__(self):
        return Unary("neg", self)


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expr):
    """A finite, nonnegative literal. Negative numbers are ``Unary('neg', ...)``."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"Const must be finite and nonnegative, got {self.value!r}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expr):
    pass


@dataclass(frozen=True, eq=True, repr=True)
class Named(Expr):
    name: str

    def __post_init__(self):
        if self.name not in CONSTANTS:
            raise ValueError(f"unknown constant {self.name!r}")


@dataclass(frozen=True, eq=True, repr=True)
class Unary(Expr):
    op: str
    arg: Expr

    def __post_init__(self):
        if self.op != "neg" and self.op not in FUNCTIONS:
            raise ValueError(f"unknown unary operator {self.op!r}")


@dataclass(frozen=True, eq=True, repr=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary operator {self.op!r}")


X = Var()
ExprLike = Union[Expr, str, float, int]


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse(value)
    v = float(value)
    return Const(v) if v >= 0 else Unary("neg", Const(-v))


def as_expr(value: ExprLike) -> Expr:
    """Accept an :class:`Expr`, expression text or a number."""
    return _coerce(value)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError("unexpected character", _byte_offset(text, pos), text[pos])
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        kind, value, pos = tok if tok is not None else self.peek()
        raise ParseError(message, _byte_offset(self.text, pos), value)

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek()[0] != "end":
            tok = self.peek()
            if tok[1] == ")":
                self.error("unbalanced parenthesis")
            self.error("unexpected token")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            return Binary("^", base, self.unary())
        return base

    def primary(self):
        tok = self.peek()
        kind, value, _ = tok
        if kind == "num":
            self.advance()
            return Const(float(value))
        if kind == "id":
            self.advance()
            if value == "x":
                return X
            if value in CONSTANTS:
                return Named(value)
            if value in FUNCTIONS:
                if self.peek()[1] != "(":
                    self.error(f"function {value!r} requires a parenthesised argument")
                self.advance()
                arg = self.expr()
                nxt = self.peek()
                if nxt[1] == ")":
                    self.advance()
                    return Unary(value, arg)
                if nxt[0] == "end":
                    raise ParseError("unbalanced parenthesis", _byte_offset(self.text, nxt[2]), "")
                self.error(f"function {value!r} takes exactly one argument")
            self.error("unknown identifier", tok)
        if kind == "op" and value == "(":
            self.advance()
            node = self.expr()
            nxt = self.peek()
            if nxt[1] != ")":
                if nxt[0] == "end":
                    raise ParseError("unbalanced parenthesis", _byte_offset(self.text, nxt[2]), "")
                self.error("expected ')'")
            self.advance()
            return node
        if kind == "end":
            self.error("unexpected end of input")
        if value == ")":
            self.error("unbalanced parenthesis")
        self.error("unexpected token")


def parse(text: str) -> Expr:
    """Parse expression text into an :class:`Expr` tree.

    >>> parse("(log(x))^2")
    Binary(op='^', left=Unary(op='log', arg=Var()), right=Const(value=2.0))
    """
    if not isinstance(text, str):
        raise TypeError("parse() expects a string")
    return _Parser(text).parse()


# ---------------------------------------------------------------- printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node: Expr) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return _PREC["neg"]
    return 5


def to_string(node: Expr) -> str:
    """Print ``node`` so that ``parse(to_string(node)) == node``."""
    if isinstance(node, Const):
        v = node.value
        return str(int(v)) if v.is_integer() and v < 1e15 else repr(v)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Named):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            inner = to_string(node.arg)
            # operand of unary minus is itself a unary-level expression
            if _prec(node.arg) < _PREC["neg"]:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{node.op}({to_string(node.arg)})"
    if isinstance(node, Binary):
        p = _PREC[node.op]
        left = to_string(node.left)
        right = to_string(node.right)
        if node.op == "^":
            # base must be a primary; exponent may be any unary-level expression
            if _prec(node.left) <= p:
                left = f"({left})"
            if _prec(node.right) < _PREC["neg"]:
                right = f"({right})"
            return f"{left}^{right}"
        if _prec(node.left) < p:
            left = f"({left})"
        # left associative: equal precedence on the right needs parentheses
        if _prec(node.right) <= p:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    raise TypeError(f"not an expression node: {node!r}")


def contains(node: Expr, op: str) -> bool:
    """True when a unary operator ``op`` occurs anywhere in ``node``."""
    if isinstance(node, Unary):
        return node.op == op or contains(node.arg, op)
    if isinstance(node, Binary):
        return contains(node.left, op) or contains(node.right, op)
    return False


def substitute(node: Expr, inner: ExprLike) -> Expr:
    """Composition ``node(inner(x))``: every occurrence of x is replaced."""
    inner = as_expr(inner)
    if isinstance(node, Var):
        return inner
    if isinstance(node, Unary):
        return Unary(node.op, substitute(node.arg, inner))
    if isinstance(node, Binary):
        return Binary(node.op, substitute(node.left, inner), substitute(node.right, inner))
    return node


def depends_on_x(node: Expr) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Unary):
        return depends_on_x(node.arg)
    if isinstance(node, Binary):
        return depends_on_x(node.left) or depends_on_x(node.right)
    return False


# ---------------------------------------------------------------- evaluation


def _domain(cond, message):
    if np.any(cond):
        raise DomainError(message)


def _pow_values(base, p):
    base, p = np.broadcast_arrays(np.asarray(base, dtype=float), np.asarray(p, dtype=float))
    _domain((base == 0) & (p < 0), "0 raised to a negative power")
    _domain((base < 0) & (p != np.floor(p)), "negative base with non-integer exponent")
    with np.errstate(over="ignore"):
        return np.power(base, p)


def _eval(node, x):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Named):
        return CONSTANTS[node.name]
    if isinstance(node, Unary):
        v = _eval(node.arg, x)
        op = node.op
        if op == "neg":
            return -v
        if op == "log":
            _domain(np.asarray(v) <= 0, "log of a non-positive number")
            return np.log(v)
        if op == "exp":
            with np.errstate(over="ignore"):
                return np.exp(v)
        if op == "sqrt":
            _domain(np.asarray(v) < 0, "sqrt of a negative number")
            return np.sqrt(v)
        if op == "sin":
            _domain(~np.isfinite(v), "sin of a non-finite number")
            return np.sin(v)
        if op == "cos":
            _domain(~np.isfinite(v), "cos of a non-finite number")
            return np.cos(v)
        if op == "abs":
            return np.abs(v)
        if op == "floor":
            return np.floor(v)
    if isinstance(node, Binary):
        a = _eval(node.left, x)
        b = _eval(node.right, x)
        op = node.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            _domain(np.asarray(b) == 0, "division by zero")
            return a / b
        if op == "^":
            return _pow_values(a, b)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(e: Expr, x):
    """Evaluate ``e`` at ``x`` (float or ndarray).

    Raises :class:`DomainError` instead of returning NaN when any point is
    outside the domain of a subexpression. Overflow gives ``inf``.
    """
    scalar = np.ndim(x) == 0
    xa = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.asarray(_eval(e, xa), dtype=float)
    if np.any(np.isnan(out)):
        raise DomainError(f"expression {to_string(e)} is undefined at some point")
    if scalar:
        return float(out)
    return np.broadcast_to(out, xa.shape).copy()


def _from_value(v):
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore"):
        return np.sign(v), np.log(np.abs(v))


def _to_value(s, l):
    with np.errstate(over="ignore", invalid="ignore"):
        return np.where(s == 0, 0.0, s * np.exp(l))


def _slog(node, x, lx):
    """Signed-log evaluation: returns (sign, log|value|)."""
    if isinstance(node, Const):
        return _from_value(node.value)
    if isinstance(node, Named):
        return 1.0, math.log(CONSTANTS[node.name])
    if isinstance(node, Var):
        if lx is not None:
            return np.ones_like(lx), lx
        return _from_value(x)
    if isinstance(node, Unary):
        op = node.op
        s, l = _slog(node.arg, x, lx)
        if op == "neg":
            return -s, l
        if op == "abs":
            return np.abs(s), l
        if op == "exp":
            v = _to_value(s, l)
            return np.ones_like(v), v
        if op == "log":
            _domain(np.asarray(s) <= 0, "log of a non-positive number")
            return _from_value(l)
        if op == "sqrt":
            _domain(np.asarray(s) < 0, "sqrt of a negative number")
            return s, l / 2.0
        v = _to_value(s, l)
        _domain(~np.isfinite(v), f"{op} of a non-finite number")
        if op == "sin":
            return _from_value(np.sin(v))
        if op == "cos":
            return _from_value(np.cos(v))
        if op == "floor":
            return _from_value(np.floor(v))
    if isinstance(node, Binary):
        op = node.op
        sa, la = _slog(node.left, x, lx)
        if op == "^":
            sb, lb = _slog(node.right, x, lx)
            p = _to_value(sb, lb)
            sa, la, p = np.broadcast_arrays(np.asarray(sa, float), np.asarray(la, float), np.asarray(p, float))
            _domain((sa == 0) & (p < 0), "0 raised to a negative power")
            _domain((sa < 0) & (p != np.floor(p)), "negative base with non-integer exponent")
            with np.errstate(invalid="ignore"):
                odd = np.mod(p, 2.0) == 1.0
                sign = np.where(sa < 0, np.where(odd, -1.0, 1.0), sa)
                sign = np.where(p == 0, 1.0, sign)
                logv = np.where(p == 0, 0.0, p * la)
            return sign, logv
        sb, lb = _slog(node.right, x, lx)
        if op == "*":
            s = sa * sb
            with np.errstate(invalid="ignore"):
                return s, np.where(s == 0, -np.inf, la + lb)
        if op == "/":
            _domain(np.asarray(sb) == 0, "division by zero")
            s = sa * sb
            with np.errstate(invalid="ignore"):
                return s, np.where(s == 0, -np.inf, la - lb)
        if op == "-":
            sb = -sb
        return _slog_add(sa, la, sb, lb)
    raise TypeError(f"not an expression node: {node!r}")


def _slog_add(sa, la, sb, lb):
    sa, la, sb, lb = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (sa, la, sb, lb)))
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        hi = np.maximum(la, lb)
        lo = np.minimum(la, lb)
        s_hi = np.where(la >= lb, sa, sb)
        s_lo = np.where(la >= lb, sb, sa)
        d = np.where(np.isfinite(hi), lo - hi, -np.inf)
        same = s_hi * s_lo >= 0
        mag = np.where(same, hi + np.log1p(np.exp(d)), hi + np.log1p(-np.exp(d)))
        sign = np.where(s_hi == 0, s_lo, s_hi)
        # exact cancellation
        zero = (~same) & (d == 0)
        sign = np.where(zero, 0.0, sign)
        mag = np.where(zero, -np.inf, mag)
        mag = np.where(sign == 0, -np.inf, mag)
    return sign, mag


def log_eval(e: Expr, x=None, *, log_x=None):
    """Evaluate ``e`` in signed-log form, returning ``(sign, log|e(x)|)``.

    Exactly one of ``x`` or ``log_x`` must be given. Passing ``log_x`` lets
    the abscissa exceed the double range (only sin/cos/floor need the raw
    value of their argument).
    """
    if (x is None) == (log_x is None):
        raise TypeError("give exactly one of x or log_x")
    scalar = np.ndim(x if log_x is None else log_x) == 0
    xa = None if x is None else np.asarray(x, dtype=float)
    la = None if log_x is None else np.asarray(log_x, dtype=float)
    shape = (xa if xa is not None else la).shape
    with np.errstate(invalid="ignore"):
        s, l = _slog(e, xa, la)
    s = np.broadcast_to(np.asarray(s, dtype=float), shape).copy()
    l = np.broadcast_to(np.asarray(l, dtype=float), shape).copy()
    if np.any(np.isnan(s)) or np.any(np.isnan(l)):
        raise DomainError(f"expression {to_string(e)} is undefined at some point")
    if scalar:
        return float(s), float(l)
    return s, l


def log_value(e: Expr, x=None, *, log_x=None):
    """``log e(x)`` for a strictly positive expression; DomainError otherwise."""
    s, l = log_eval(e, x, log_x=log_x)
    if np.any(np.asarray(s) <= 0):
        raise DomainError(f"expression {to_string(e)} is not positive at some point")
    return l


# ---------------------------------------------------------------- derivatives

ZERO = Const(0.0)
ONE = Const(1.0)


def _is_const(node, value=None):
    return isinstance(node, Const) and (value is None or node.value == value)


def _mul(a, b):
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return Binary("*", a, b)


def _add(a, b):
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Binary("+", a, b)


def _sub(a, b):
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    return Binary("-", a, b)


def _neg(a):
    if _is_const(a, 0.0):
        return ZERO
    return Unary("neg", a)


def _div(a, b):
    if _is_const(a, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    return Binary("/", a, b)


def _literal(v: float) -> Expr:
    return Const(v) if v >= 0 else Unary("neg", Const(-v))


def _literal_value(node):
    """Numeric value of a literal (possibly negated) constant, else None."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Unary) and node.op == "neg" and isinstance(node.arg, Const):
        return -node.arg.value
    return None


def differentiate(e: Expr) -> Expr:
    """Symbolic derivative d/dx by structural rules.

    Only multiplications/additions with the literals 0 and 1 are folded; the
    result is otherwise unsimplified. ``floor`` differentiates to 0 (its
    derivative almost everywhere).
    """
    if isinstance(e, (Const, Named)):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Unary):
        u = e.arg
        du = differentiate(u)
        op = e.op
        if op == "neg":
            return _neg(du)
        if op == "floor" or _is_const(du, 0.0):
            return ZERO
        if op == "exp":
            return _mul(e, du)
        if op == "log":
            return _div(du, u)
        if op == "sqrt":
            return _div(du, _mul(Const(2.0), e))
        if op == "sin":
            return _mul(Unary("cos", u), du)
        if op == "cos":
            return _neg(_mul(Unary("sin", u), du))
        if op == "abs":
            return _mul(_div(u, e), du)
    if isinstance(e, Binary):
        a, b = e.left, e.right
        da, db = differentiate(a), differentiate(b)
        op = e.op
        if op == "+":
            return _add(da, db)
        if op == "-":
            return _sub(da, db)
        if op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if op == "/":
            return _div(_sub(_mul(da, b), _mul(a, db)), Binary("^", b, Const(2.0)))
        if op == "^":
            if not depends_on_x(b):
                c = _literal_value(b)
                lowered = _literal(c - 1.0) if c is not None else Binary("-", b, ONE)
                return _mul(_mul(b, Binary("^", a, lowered)), da)
            if not depends_on_x(a):
                return _mul(_mul(e, Unary("log", a)), db)
            return _mul(e, _add(_mul(db, Unary("log", a)), _div(_mul(b, da), a)))
    raise TypeError(f"not an expression node: {e!r}")


def log_derivative(e: Expr) -> Expr:
    """Expression for ``(log|e|)' = e'/e``, built structurally.

    Products, quotients, powers and ``exp`` are split before dividing, so
    ``log_derivative(exp(x^2))`` is ``2*x^1`` rather than
    ``exp(x^2)*2*x^1 / exp(x^2)``; evaluating the latter in signed-log form
    subtracts two numbers of size ``x^2`` and loses every digit at large x.
    """
    if not depends_on_x(e):
        return ZERO
    if isinstance(e, Var):
        return Binary("/", ONE, e)
    if isinstance(e, Unary):
        if e.op == "exp":
            return differentiate(e.arg)
        if e.op in ("neg", "abs"):
            return log_derivative(e.arg)
        if e.op == "sqrt":
            return _mul(Const(0.5), log_derivative(e.arg))
    if isinstance(e, Binary):
        a, b = e.left, e.right
        if e.op == "*":
            return _add(log_derivative(a), log_derivative(b))
        if e.op == "/":
            return _sub(log_derivative(a), log_derivative(b))
        if e.op == "^":
            if not depends_on_x(b):
                return _mul(b, log_derivative(a))
            return _add(_mul(differentiate(b), Unary("log", Unary("abs", a))),
                        _mul(b, log_derivative(a)))
    return Binary("/", differentiate(e), e)
