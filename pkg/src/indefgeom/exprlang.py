"""Scalar expressions over chart coordinates.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' exponent)*
    exponent:= ['-'] primary           # must fold to a constant
    primary := NUMBER | COORD | FUNC '(' expr ')' | '(' expr ')'

All binary operators are left-associative. A unary minus applied directly
to a bare numeric literal (not followed by ``^``) yields a negative
constant, so ``-2`` parses to ``Const(-2.0)`` and ``-2^2`` to
``Neg(Pow(2, 2))``.

Expressions are immutable trees. Differentiation is exact and folds
constants (``0*x -> 0``, ``x+0 -> x``) but performs no other
simplification. For repeated numeric evaluation, :func:`compile_exprs`
turns a batch of expressions into a single Python function.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    DomainError,
    ExprSyntaxError,
    InputError,
    NonConstantExponentError,
    UnknownIdentifierError,
)

FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh", "sqrt")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: float


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Expr"


Expr = Union[Const, Var, Neg, BinOp, Pow, Func]

ZERO = Const(0.0)
ONE = Const(1.0)


# ---------------------------------------------------------------------------
# Tokenizer and parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, coords: Sequence[str]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.coords = {name: i for i, name in enumerate(coords)}

    def peek(self, ahead: int = 0):
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, text, offset = self.peek()
        if text != value or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", offset)
        return self.take()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", offset)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            nxt, after = self.peek(), self.peek(1)
            if nxt[0] == "num" and not (after[0] == "op" and after[1] == "^"):
                self.take()
                return Const(-float(nxt[1]))
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        while self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            offset = self.peek()[2]
            negate = False
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                negate = True
            exponent = self.primary()
            if _has_var(exponent):
                raise NonConstantExponentError(offset)
            try:
                value = _interp(exponent, ())
            except DomainError as exc:
                raise ExprSyntaxError(f"invalid exponent ({exc.reason})", offset) from None
            base = Pow(base, -value if negate else value)
        return base

    def primary(self) -> Expr:
        kind, text, offset = self.peek()
        if kind == "num":
            self.take()
            return Const(float(text))
        if kind == "ident":
            self.take()
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(text, arg)
            if text in self.coords:
                return Var(text, self.coords[text])
            raise UnknownIdentifierError(text, offset)
        if kind == "op" and text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", offset)


def parse_expr(text: str, coords: Sequence[str]) -> Expr:
    """Parse ``text`` into an expression tree over the named coordinates."""
    for name in coords:
        if name in FUNCTIONS:
            raise InputError(f"coordinate name {name!r} clashes with a function name")
    return _Parser(text, coords).parse()


def _has_var(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, Const):
        return False
    if isinstance(e, BinOp):
        return _has_var(e.left) or _has_var(e.right)
    if isinstance(e, Pow):
        return _has_var(e.base)
    return _has_var(e.arg)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Const) and math.copysign(1.0, e.value) < 0:
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def render(e: Expr) -> str:
    """Inverse of :func:`parse_expr` up to whitespace."""
    if isinstance(e, Const):
        if math.copysign(1.0, e.value) < 0:
            return "-" + _fmt_number(-e.value)
        return _fmt_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({render(e.arg)})"
    if isinstance(e, Neg):
        inner = render(e.arg)
        if _prec(e.arg) < 3 or (isinstance(e.arg, Const) and e.arg.value >= 0):
            inner = f"({inner})"
        return "-" + inner
    if isinstance(e, Pow):
        base = render(e.base)
        if _prec(e.base) < 4:
            base = f"({base})"
        exp = e.exponent
        if math.copysign(1.0, exp) < 0:
            return f"{base}^-{_fmt_number(-exp)}"
        return f"{base}^{_fmt_number(exp)}"
    p = _PREC[e.op]
    left = render(e.left)
    if _prec(e.left) < p:
        left = f"({left})"
    right = render(e.right)
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left}{e.op}{right}"


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

_MATH = {
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "sqrt": math.sqrt,
}


def _interp(e: Expr, point: Sequence[float]) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return float(point[e.index])
    if isinstance(e, Neg):
        return -_interp(e.arg, point)
    if isinstance(e, BinOp):
        a = _interp(e.left, point)
        b = _interp(e.right, point)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0.0:
            raise DomainError(render(e), "division by zero")
        return a / b
    if isinstance(e, Pow):
        b = _interp(e.base, point)
        if b == 0.0 and e.exponent < 0:
            raise DomainError(render(e), "zero to a negative power")
        if b < 0.0 and not float(e.exponent).is_integer():
            raise DomainError(render(e), "negative base with fractional exponent")
        try:
            return math.pow(b, e.exponent)
        except OverflowError:
            raise DomainError(render(e), "overflow") from None
    a = _interp(e.arg, point)
    if e.name == "log" and a <= 0.0:
        raise DomainError(render(e), "log of non-positive value")
    if e.name == "sqrt" and a < 0.0:
        raise DomainError(render(e), "sqrt of negative value")
    try:
        return _MATH[e.name](a)
    except OverflowError:
        raise DomainError(render(e), "overflow") from None


def eval_expr(e: Expr, point: Sequence[float]) -> float:
    """Evaluate ``e`` at a coordinate point (double precision)."""
    value = _interp(e, point)
    if not math.isfinite(value):
        raise DomainError(render(e), "non-finite result")
    return value


def _py(e: Expr) -> str:
    if isinstance(e, Const):
        return repr(e.value) if e.value >= 0 else f"({e.value!r})"
    if isinstance(e, Var):
        return f"x[{e.index}]"
    if isinstance(e, Neg):
        return f"(-{_py(e.arg)})"
    if isinstance(e, BinOp):
        return f"({_py(e.left)}{e.op}{_py(e.right)})"
    if isinstance(e, Pow):
        if float(e.exponent).is_integer() and abs(e.exponent) < 64:
            return f"({_py(e.base)}**{int(e.exponent)})"
        return f"_pow({_py(e.base)},{e.exponent!r})"
    return f"{e.name}({_py(e.arg)})"


def compile_exprs(exprs: Sequence[Expr]) -> Callable[[Sequence[float]], np.ndarray]:
    """Compile a batch of expressions into one vectorised evaluator.

    The returned callable maps a point to a float array of values. Domain
    failures are re-run through the interpreter so the offending
    subexpression is named in the :class:`DomainError`.
    """
    exprs = list(exprs)
    body = ",".join(_py(e) for e in exprs)
    src = f"def _f(x):\n    return ({body}{',' if exprs else ''})\n"
    namespace = dict(_MATH)
    namespace["_pow"] = math.pow
    exec(compile(src, "<exprlang>", "exec"), namespace)
    raw = namespace["_f"]

    def evaluate(point: Sequence[float]) -> np.ndarray:
        x = [float(v) for v in point]
        try:
            out = np.array(raw(x), dtype=float)
        except (ValueError, ZeroDivisionError, OverflowError, TypeError):
            out = None
        if out is None or not np.all(np.isfinite(out)):
            for e in exprs:
                eval_expr(e, x)
            raise DomainError("<batch>", "non-finite result")
        return out

    return evaluate


# ---------------------------------------------------------------------------
# Folding constructors and differentiation
# ---------------------------------------------------------------------------


def _is_const(e: Expr, value: float | None = None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


def const(v: float) -> Const:
    return Const(float(v))


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a, -1.0):
        return neg(b)
    if _is_const(b, -1.0):
        return neg(a)
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return Const(a.value / b.value)
    return BinOp("/", a, b)


def power(base: Expr, exponent: float) -> Expr:
    exponent = float(exponent)
    if exponent == 0.0:
        return ONE
    if exponent == 1.0:
        return base
    if isinstance(base, Const):
        try:
            return Const(_interp(Pow(base, exponent), ()))
        except DomainError:
            pass
    return Pow(base, exponent)


def func(name: str, arg: Expr) -> Expr:
    if isinstance(arg, Const):
        try:
            return Const(_interp(Func(name, arg), ()))
        except DomainError:
            pass
    return Func(name, arg)


def _coord_name(coord: Union[str, Var]) -> str:
    return coord.name if isinstance(coord, Var) else coord


def diff_expr(e: Expr, coord: Union[str, Var]) -> Expr:
    """Exact derivative of ``e`` with respect to the named coordinate."""
    return _diff(e, _coord_name(coord))


def _diff(e: Expr, c: str) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == c else ZERO
    if isinstance(e, Neg):
        return neg(_diff(e.arg, c))
    if isinstance(e, BinOp):
        da = _diff(e.left, c)
        db = _diff(e.right, c)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, e.right), mul(e.left, db))
        # quotient rule, split so a constant numerator or denominator stays small
        if _is_const(db, 0.0):
            return div(da, e.right)
        return sub(div(da, e.right), div(mul(e.left, db), power(e.right, 2)))
    if isinstance(e, Pow):
        du = _diff(e.base, c)
        if _is_const(du, 0.0):
            return ZERO
        return mul(mul(const(e.exponent), power(e.base, e.exponent - 1.0)), du)
    du = _diff(e.arg, c)
    if _is_const(du, 0.0):
        return ZERO
    u = e.arg
    if e.name == "exp":
        outer = e
    elif e.name == "log":
        return div(du, u)
    elif e.name == "sin":
        outer = func("cos", u)
    elif e.name == "cos":
        outer = neg(func("sin", u))
    elif e.name == "sinh":
        outer = func("cosh", u)
    elif e.name == "cosh":
        outer = func("sinh", u)
    else:  # sqrt
        return div(du, mul(const(2.0), e))
    return mul(outer, du)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace coordinate references by expressions (composition of maps)."""
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return mapping[e.name]
    if isinstance(e, Neg):
        return neg(substitute(e.arg, mapping))
    if isinstance(e, BinOp):
        a = substitute(e.left, mapping)
        b = substitute(e.right, mapping)
        return {"+": add, "-": sub, "*": mul, "/": div}[e.op](a, b)
    if isinstance(e, Pow):
        return power(substitute(e.base, mapping), e.exponent)
    return func(e.name, substitute(e.arg, mapping))


def free_coords(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, BinOp):
        return free_coords(e.left) | free_coords(e.right)
    if isinstance(e, Pow):
        return free_coords(e.base)
    return free_coords(e.arg)


def size(e: Expr) -> int:
    """Node count."""
    if isinstance(e, (Const, Var)):
        return 1
    if isinstance(e, BinOp):
        return 1 + size(e.left) + size(e.right)
    if isinstance(e, Pow):
        return 1 + size(e.base)
    return 1 + size(e.arg)
