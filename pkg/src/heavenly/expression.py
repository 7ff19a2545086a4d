"""Small expression language for manufactured fields.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Variables are x, x1, x2, y, t; ``pi`` is a constant; functions are sin, cos,
exp and log.  Expressions differentiate symbolically and evaluate on numpy
arrays.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

VARIABLES = ("x", "x1", "x2", "y", "t")
FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log}
CONSTANTS = {"pi": math.pi}


class ExpressionError(ValueError):
    def __init__(self, position: int, message: str):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.message = message


class ExpressionSyntaxError(ExpressionError):
    pass


class UnknownIdentifier(ExpressionError):
    pass


# -- AST ---------------------------------------------------------------------


class Expression:
    def diff(self, var: str) -> "Expression":
        raise NotImplementedError

    def evaluate(self, env: Mapping[str, object]):
        raise NotImplementedError

    def variables(self) -> frozenset[str]:
        return frozenset()

    def derivative(self, **orders: int) -> "Expression":
        """Mixed partial derivative, e.g. ``derivative(x=1, t=1)``."""
        out = self
        for var, k in orders.items():
            for _ in range(k):
                out = out.diff(var)
        return out

    def __call__(self, **env):
        return self.evaluate(env)


@dataclass(frozen=True)
class Num(Expression):
    value: float

    def diff(self, var):
        return ZERO

    def evaluate(self, env):
        return self.value

    def __str__(self):
        return repr(self.value) if self.value >= 0 else f"({self.value!r})"


ZERO = Num(0.0)
ONE = Num(1.0)


@dataclass(frozen=True)
class Var(Expression):
    name: str

    def diff(self, var):
        return ONE if var == self.name else ZERO

    def evaluate(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise KeyError(f"no value supplied for variable {self.name!r}") from None

    def variables(self):
        return frozenset({self.name})

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Binary(Expression):
    op: str
    left: Expression
    right: Expression

    def variables(self):
        return self.left.variables() | self.right.variables()

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        return np.power(a, b) if isinstance(a, np.ndarray) or isinstance(b, np.ndarray) else a**b

    def diff(self, var):
        a, b = self.left, self.right
        da, db = a.diff(var), b.diff(var)
        if self.op in "+-":
            return binary(self.op, da, db)
        if self.op == "*":
            return add(mul(da, b), mul(a, db))
        if self.op == "/":
            return sub(div(da, b), div(mul(a, db), power(b, Num(2.0))))
        # power
        if isinstance(b, Num):
            return mul(mul(b, power(a, Num(b.value - 1.0))), da)
        return mul(self, add(mul(db, Call("log", a)), div(mul(b, da), a)))

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Neg(Expression):
    arg: Expression

    def diff(self, var):
        return neg(self.arg.diff(var))

    def evaluate(self, env):
        return -self.arg.evaluate(env)

    def variables(self):
        return self.arg.variables()

    def __str__(self):
        return f"(-{self.arg})"


@dataclass(frozen=True)
class Call(Expression):
    func: str
    arg: Expression

    def diff(self, var):
        a = self.arg
        da = a.diff(var)
        if self.func == "sin":
            outer = Call("cos", a)
        elif self.func == "cos":
            outer = neg(Call("sin", a))
        elif self.func == "exp":
            outer = self
        else:
            outer = div(ONE, a)
        return mul(outer, da)

    def evaluate(self, env):
        return FUNCTIONS[self.func](self.arg.evaluate(env))

    def variables(self):
        return self.arg.variables()

    def __str__(self):
        return f"{self.func}({self.arg})"


# -- simplifying constructors ------------------------------------------------


def _num(e):
    return e.value if isinstance(e, Num) else None


def add(a, b):
    if _num(a) == 0:
        return b
    if _num(b) == 0:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    return Binary("+", a, b)


def sub(a, b):
    if _num(b) == 0:
        return a
    if _num(a) == 0:
        return neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    return Binary("-", a, b)


def mul(a, b):
    if _num(a) == 0 or _num(b) == 0:
        return ZERO
    if _num(a) == 1:
        return b
    if _num(b) == 1:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return Binary("*", a, b)


def div(a, b):
    if _num(a) == 0:
        return ZERO
    if _num(b) == 1:
        return a
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0:
        return Num(a.value / b.value)
    return Binary("/", a, b)


def power(a, b):
    if _num(b) == 0:
        return ONE
    if _num(b) == 1:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value**b.value)
    return Binary("^", a, b)


def neg(a):
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def binary(op, a, b):
    return {"+": add, "-": sub, "*": mul, "/": div, "^": power}[op](a, b)


# -- parser ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ExpressionSyntaxError(i, f"unexpected character {text[i]!r}")
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(_Tok("num", m.group(1), start))
        elif m.group(2):
            toks.append(_Tok("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            toks.append(_Tok("op", op, start))
        i = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, *ops) -> _Tok | None:
        if self.cur.kind == "op" and self.cur.text in ops:
            return self.take()
        return None

    def expect(self, op: str):
        if not self.accept(op):
            found = "end of input" if self.cur.kind == "end" else repr(self.cur.text)
            raise ExpressionSyntaxError(self.cur.pos, f"expected {op!r}, found {found}")

    def parse(self) -> Expression:
        e = self.expr()
        if self.cur.kind != "end":
            raise ExpressionSyntaxError(self.cur.pos, f"unexpected {self.cur.text!r}")
        return e

    def expr(self):
        e = self.term()
        while tok := self.accept("+", "-"):
            e = Binary(tok.text, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while tok := self.accept("*", "/"):
            e = Binary(tok.text, e, self.unary())
        return e

    def unary(self):
        if self.accept("-"):
            return neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return Binary("^", base, self.unary())
        return base

    def atom(self):
        tok = self.cur
        if tok.kind == "num":
            self.take()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.take()
            name = tok.text
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if self.cur.kind == "op" and self.cur.text == "(":
                raise UnknownIdentifier(tok.pos, f"unknown function {name!r}")
            if name in VARIABLES:
                return Var(name)
            if name in CONSTANTS:
                return Num(CONSTANTS[name])
            raise UnknownIdentifier(tok.pos, f"unknown identifier {name!r}")
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExpressionSyntaxError(tok.pos, f"expected a number, name or '(', found {found}")


def parse_expression(text: str) -> Expression:
    if not text or not text.strip():
        raise ExpressionSyntaxError(0, "empty expression")
    return _Parser(text).parse()


def self_test(expr: Expression, env: Mapping[str, float], step: float = 1e-5) -> float:
    """Largest relative gap between symbolic first derivatives and central differences."""
    worst = 0.0
    for var in sorted(expr.variables()):
        up = dict(env)
        dn = dict(env)
        up[var] = env[var] + step
        dn[var] = env[var] - step
        fd = (np.asarray(expr.evaluate(up)) - np.asarray(expr.evaluate(dn))) / (2 * step)
        exact = np.asarray(expr.diff(var).evaluate(env))
        scale = max(float(np.abs(exact).max()), 1.0)
        worst = max(worst, float(np.abs(fd - exact).max()) / scale)
    return worst
