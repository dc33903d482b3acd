"""Arithmetic expressions over coordinates ``x0..`` and velocities ``xdot0..``.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?          # right associative
    primary := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

so ``-2^2 == -4`` and ``2^3^2 == 2^9``.  There is no implicit multiplication.
Error offsets are 1-based; running out of input is reported at ``len(src) + 1``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import DivisionByZero, EvalError, ParseError, VelocityNotAllowed

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)
_VAR = re.compile(r"(xdot|x)(\d+)$")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    velocity: bool
    index: int


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Const, Neg, BinOp, Call]


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int  # 1-based


def _tokenize(src):
    toks = []
    i = 0
    n = len(src)
    while i < n:
        if src[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(src, i)
        if m is None or m.lastgroup is None:
            raise ParseError(i + 1, "a number, name, operator or parenthesis", repr(src[i]))
        toks.append(_Tok(m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup) + 1))
        i = m.end()
    toks.append(_Tok("end", "", n + 1))
    return toks


def _describe(tok):
    return "end of input" if tok.kind == "end" else repr(tok.text)


class _Parser:
    def __init__(self, src, dim, allow_velocity):
        self.toks = _tokenize(src)
        self.i = 0
        self.dim = dim
        self.allow_velocity = allow_velocity

    @property
    def tok(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, *ops):
        if self.tok.kind == "op" and self.tok.text in ops:
            return self.advance()
        return None

    def expect(self, op):
        if self.accept(op) is None:
            raise ParseError(self.tok.pos, repr(op), _describe(self.tok))

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(self.tok.pos, "an operator or end of input", _describe(self.tok))
        return node

    def expr(self):
        node = self.term()
        while (tok := self.accept("+", "-")) is not None:
            node = BinOp(tok.text, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while (tok := self.accept("*", "/")) is not None:
            node = BinOp(tok.text, node, self.unary())
        return node

    def unary(self):
        if self.accept("-") is not None:
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.accept("^") is not None:
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text in CONSTANTS:
                return Const(tok.text)
            m = _VAR.match(tok.text)
            if m is None:
                raise ParseError(tok.pos, "a variable, constant or function name", repr(tok.text))
            velocity = m.group(1) == "xdot"
            index = int(m.group(2))
            if velocity and not self.allow_velocity:
                raise VelocityNotAllowed(tok.pos, "a function of position only", repr(tok.text))
            if index >= self.dim:
                raise ParseError(tok.pos, f"a variable index below {self.dim}", repr(tok.text))
            return Var(velocity, index)
        if self.accept("(") is not None:
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(tok.pos, "a number, name or '('", _describe(tok))


def parse(src: str, dim: int, allow_velocity: bool = False) -> Expr:
    return _Parser(src, dim, allow_velocity).parse()


def _pow(a, b):
    if a == 0.0 and b < 0:
        raise DivisionByZero("zero raised to a negative power")
    if a < 0.0 and b != math.floor(b):
        raise EvalError(f"negative base {a!r} with non-integer exponent {b!r}")
    try:
        return math.pow(a, b)
    except OverflowError as exc:
        raise EvalError(str(exc)) from None


def eval_expr(e: Expr, x: Sequence[float], xdot: Optional[Sequence[float]] = None) -> float:
    """Evaluate ``e`` in IEEE double arithmetic.

    Domain violations raise :class:`EvalError` instead of producing NaN.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        if e.velocity:
            if xdot is None:
                raise EvalError(f"xdot{e.index} is unbound")
            return float(xdot[e.index])
        return float(x[e.index])
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Neg):
        return -eval_expr(e.operand, x, xdot)
    if isinstance(e, Call):
        arg = eval_expr(e.arg, x, xdot)
        if e.func == "log" and arg <= 0.0:
            raise EvalError(f"log of non-positive value {arg!r}")
        if e.func == "sqrt" and arg < 0.0:
            raise EvalError(f"sqrt of negative value {arg!r}")
        try:
            out = FUNCTIONS[e.func](arg)
        except (OverflowError, ValueError) as exc:
            raise EvalError(f"{e.func}({arg!r}): {exc}") from None
        return float(out)
    a = eval_expr(e.left, x, xdot)
    b = eval_expr(e.right, x, xdot)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        if b == 0.0:
            raise DivisionByZero("division by zero")
        return a / b
    return _pow(a, b)


def to_source(e: Expr) -> str:
    """Fully parenthesised text that parses back to an equivalent tree."""
    if isinstance(e, Num):
        if math.isinf(e.value):
            return "(-1e999)" if e.value < 0 else "1e999"
        if math.copysign(1.0, e.value) < 0:
            return f"(-{repr(-e.value)})"
        return repr(e.value)
    if isinstance(e, Var):
        return f"{'xdot' if e.velocity else 'x'}{e.index}"
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    return f"({to_source(e.left)}{e.op}{to_source(e.right)})"


def uses_velocity(e: Expr) -> bool:
    if isinstance(e, Var):
        return e.velocity
    if isinstance(e, (Neg,)):
        return uses_velocity(e.operand)
    if isinstance(e, Call):
        return uses_velocity(e.arg)
    if isinstance(e, BinOp):
        return uses_velocity(e.left) or uses_velocity(e.right)
    return False


def is_constant(e: Expr) -> bool:
    if isinstance(e, (Num, Const)):
        return True
    if isinstance(e, Var):
        return False
    if isinstance(e, Neg):
        return is_constant(e.operand)
    if isinstance(e, Call):
        return is_constant(e.arg)
    return is_constant(e.left) and is_constant(e.right)
