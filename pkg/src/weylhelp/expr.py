"""Coefficient expressions: a small recursive-descent parser and evaluator.

Grammar (whitespace is ignored)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative
    atom    := NUMBER | 'x' | FUNC '(' expr ')' | '(' expr ')'

so ``-x^2`` is ``-(x^2)`` and ``2^-1`` is accepted.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

__all__ = [
    "Expr", "Num", "Var", "Neg", "BinOp", "Call",
    "ExprSyntaxError", "ExprNameError", "ExprDomainError",
    "parse", "evaluate", "to_text", "compile_expr",
]

FUNCTIONS = ("exp", "sin", "cos", "sqrt")


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ExprNameError(ExprSyntaxError):
    pass


class ExprDomainError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


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


Expr = Union[Num, Var, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, off = self.take()
        if val != value or kind != "op":
            raise ExprSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", off)

    def parse(self) -> Expr:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {val!r}", off)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and val == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val == "x":
                return Var()
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            raise ExprNameError(f"unknown identifier {val!r}", off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", off)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree in the variable ``x``."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


def _int_power(base: float, n: int) -> float:
    if n < 0:
        if base == 0.0:
            raise ExprDomainError("zero raised to a negative power")
        return 1.0 / _int_power(base, -n)
    result = 1.0
    while n:
        if n & 1:
            result *= base
        base *= base
        n >>= 1
    return result


def _power(base: float, exponent: float) -> float:
    if float(exponent).is_integer():
        return _int_power(base, int(exponent))
    if base > 0.0:
        return math.exp(exponent * math.log(base))
    if base == 0.0 and exponent > 0.0:
        return 0.0
    raise ExprDomainError(f"non-integer power {exponent!r} of non-positive base {base!r}")


def _divide(a: float, b: float) -> float:
    if b == 0.0:
        raise ExprDomainError("division by zero")
    return a / b


def _sqrt(a: float) -> float:
    if a < 0.0:
        raise ExprDomainError(f"sqrt of negative value {a!r}")
    return math.sqrt(a)


def _exp(a: float) -> float:
    try:
        return math.exp(a)
    except OverflowError:
        raise ExprDomainError(f"exp overflow at argument {a!r}") from None


_BINARY: dict[str, Callable[[float, float], float]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _divide,
    "^": _power,
}
_UNARY: dict[str, Callable[[float], float]] = {
    "exp": _exp,
    "sin": math.sin,
    "cos": math.cos,
    "sqrt": _sqrt,
}


def evaluate(e: Expr, x: float) -> float:
    """Evaluate ``e`` at ``x`` in double precision."""
    if not math.isfinite(x):
        raise ExprDomainError(f"non-finite argument {x!r}")
    return compile_expr(e)(x)


def compile_expr(e: Expr) -> Callable[[float], float]:
    """Turn a tree into a nest of closures; the hot path of every ODE step."""
    if isinstance(e, Num):
        v = e.value
        return lambda x: v
    if isinstance(e, Var):
        return lambda x: x
    if isinstance(e, Neg):
        f = compile_expr(e.operand)
        return lambda x: -f(x)
    if isinstance(e, Call):
        g = _UNARY[e.func]
        f = compile_expr(e.arg)
        return lambda x: g(f(x))
    if isinstance(e, BinOp):
        fl = compile_expr(e.left)
        if e.op == "^" and isinstance(e.right, Num) and e.right.value.is_integer():
            n = int(e.right.value)
            return lambda x: _int_power(fl(x), n)
        fr = compile_expr(e.right)
        op = _BINARY[e.op]
        return lambda x: op(fl(x), fr(x))
    raise TypeError(f"not an expression node: {e!r}")


def to_text(e: Expr) -> str:
    """Render a tree back to parseable text, fully parenthesised where needed."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return f"-({to_text(e.operand)})"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    return f"({to_text(e.left)}){e.op}({to_text(e.right)})"
