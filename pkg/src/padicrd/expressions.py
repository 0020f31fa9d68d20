"""Small arithmetic-expression language for user-defined reaction terms.

Grammar (standard precedence, ``^`` binds tightest and right-associative,
exponents restricted to integer constants so differentiation stays
closed on the tree):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?
    atom   := NUMBER | NAME | '(' expr ')'

Names are resolved later against {u, v} plus the model's parameter set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "ParseError",
    "EvaluationError",
    "Node",
    "Num",
    "Name",
    "Neg",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "parse",
    "evaluate",
    "derivative",
    "simplify",
    "to_string",
    "names_in",
]


class ParseError(ValueError):
    def __init__(self, message: str, position: int, expected: str | None = None):
        self.position = position
        self.expected = expected
        detail = f"syntax error at position {position}: {message}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class EvaluationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Div:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


Node = Union[Num, Name, Neg, Add, Sub, Mul, Div, Pow]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_pos = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[bad_pos]!r}", bad_pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


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

    def expect_op(self, symbol: str):
        kind, value, pos = self.peek()
        if kind == "op" and value == symbol:
            return self.advance()
        raise ParseError(f"got {value!r}" if value else "unexpected end of input",
                         pos, expected=repr(symbol))

    def parse(self) -> Node:
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {value!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                node = Add(node, rhs) if value == "+" else Sub(node, rhs)
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                rhs = self.unary()
                node = Mul(node, rhs) if value == "*" else Div(node, rhs)
            else:
                return node

    def unary(self) -> Node:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        sign = 1
        kind, value, pos = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            sign = -1
            kind, value, pos = self.peek()
        if kind != "number":
            raise ParseError(f"got {value!r}" if value else "unexpected end of input",
                             pos, expected="an integer exponent")
        if not re.fullmatch(r"\d+", value):
            raise ParseError(f"exponent {value!r} is not an integer", pos,
                             expected="an integer exponent")
        self.advance()
        return sign * int(value)

    def atom(self) -> Node:
        kind, value, pos = self.peek()
        if kind == "number":
            self.advance()
            return Num(float(value))
        if kind == "name":
            self.advance()
            return Name(value)
        if kind == "op" and value == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"got {value!r}" if value else "unexpected end of input",
                         pos, expected="a number, a name, or '('")


def parse(text: str) -> Node:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()


def names_in(node: Node) -> set[str]:
    if isinstance(node, Name):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Neg):
        return names_in(node.arg)
    if isinstance(node, Pow):
        return names_in(node.base)
    return names_in(node.left) | names_in(node.right)


def evaluate(node: Node, env: dict[str, float | np.ndarray]):
    """Evaluate on scalars or numpy arrays; division by zero raises."""
    with np.errstate(divide="raise", invalid="raise"):
        try:
            return _eval(node, env)
        except (FloatingPointError, ZeroDivisionError) as exc:
            raise EvaluationError(f"division by zero while evaluating: {exc}") from exc


def _eval(node: Node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        try:
            return env[node.name]
        except KeyError:
            raise EvaluationError(f"unknown identifier {node.name!r}") from None
    if isinstance(node, Neg):
        return -_eval(node.arg, env)
    if isinstance(node, Add):
        return _eval(node.left, env) + _eval(node.right, env)
    if isinstance(node, Sub):
        return _eval(node.left, env) - _eval(node.right, env)
    if isinstance(node, Mul):
        return _eval(node.left, env) * _eval(node.right, env)
    if isinstance(node, Div):
        num, den = _eval(node.left, env), _eval(node.right, env)
        if isinstance(den, (int, float)) and den == 0:
            raise ZeroDivisionError("denominator is zero")
        return num / den
    if isinstance(node, Pow):
        base = _eval(node.base, env)
        if node.exponent < 0:
            if isinstance(base, (int, float)) and base == 0:
                raise ZeroDivisionError("zero raised to a negative power")
            return np.power(base, float(node.exponent))
        return np.power(base, node.exponent)
    raise TypeError(f"not an expression node: {node!r}")


def derivative(node: Node, var: str) -> Node:
    """Symbolic partial derivative with respect to ``var``, simplified."""
    return simplify(_diff(node, var))


def _diff(node: Node, var: str) -> Node:
    if isinstance(node, Num):
        return Num(0.0)
    if isinstance(node, Name):
        return Num(1.0) if node.name == var else Num(0.0)
    if isinstance(node, Neg):
        return Neg(_diff(node.arg, var))
    if isinstance(node, Add):
        return Add(_diff(node.left, var), _diff(node.right, var))
    if isinstance(node, Sub):
        return Sub(_diff(node.left, var), _diff(node.right, var))
    if isinstance(node, Mul):
        return Add(
            Mul(_diff(node.left, var), node.right),
            Mul(node.left, _diff(node.right, var)),
        )
    if isinstance(node, Div):
        return Div(
            Sub(
                Mul(_diff(node.left, var), node.right),
                Mul(node.left, _diff(node.right, var)),
            ),
            Pow(node.right, 2),
        )
    if isinstance(node, Pow):
        if node.exponent == 0:
            return Num(0.0)
        return Mul(
            Mul(Num(float(node.exponent)), Pow(node.base, node.exponent - 1)),
            _diff(node.base, var),
        )
    raise TypeError(f"not an expression node: {node!r}")


def simplify(node: Node) -> Node:
    """Light canonicalization: constant folding and unit/zero elimination."""
    if isinstance(node, (Num, Name)):
        return node
    if isinstance(node, Neg):
        arg = simplify(node.arg)
        if isinstance(arg, Num):
            return Num(-arg.value)
        if isinstance(arg, Neg):
            return arg.arg
        return Neg(arg)
    if isinstance(node, Pow):
        base = simplify(node.base)
        if node.exponent == 0:
            return Num(1.0)
        if node.exponent == 1:
            return base
        if isinstance(base, Num):
            return Num(float(base.value**node.exponent))
        return Pow(base, node.exponent)

    left = simplify(node.left)
    right = simplify(node.right)
    lnum = left.value if isinstance(left, Num) else None
    rnum = right.value if isinstance(right, Num) else None

    if isinstance(node, Add):
        if lnum == 0.0:
            return right
        if rnum == 0.0:
            return left
        if lnum is not None and rnum is not None:
            return Num(lnum + rnum)
        return Add(left, right)
    if isinstance(node, Sub):
        if rnum == 0.0:
            return left
        if lnum == 0.0:
            return simplify(Neg(right))
        if lnum is not None and rnum is not None:
            return Num(lnum - rnum)
        return Sub(left, right)
    if isinstance(node, Mul):
        if lnum == 0.0 or rnum == 0.0:
            return Num(0.0)
        if lnum == 1.0:
            return right
        if rnum == 1.0:
            return left
        if lnum is not None and rnum is not None:
            return Num(lnum * rnum)
        return Mul(left, right)
    if isinstance(node, Div):
        if lnum == 0.0:
            return Num(0.0)
        if rnum == 1.0:
            return left
        if lnum is not None and rnum is not None and rnum != 0.0:
            return Num(lnum / rnum)
        return Div(left, right)
    raise TypeError(f"not an expression node: {node!r}")


_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4, Num: 5, Name: 5}


def _fmt_num(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def to_string(node: Node, parent_prec: int = 0) -> str:
    prec = _PREC[type(node)]
    if isinstance(node, Num):
        text = _fmt_num(node.value)
        if node.value < 0 and parent_prec > 0:
            return f"({text})"
        return text
    elif isinstance(node, Name):
        text = node.name
    elif isinstance(node, Neg):
        text = f"-{to_string(node.arg, prec)}"
    elif isinstance(node, Add):
        text = f"{to_string(node.left, prec)} + {to_string(node.right, prec + 1)}"
    elif isinstance(node, Sub):
        text = f"{to_string(node.left, prec)} - {to_string(node.right, prec + 1)}"
    elif isinstance(node, Mul):
        text = f"{to_string(node.left, prec)}*{to_string(node.right, prec + 1)}"
    elif isinstance(node, Div):
        text = f"{to_string(node.left, prec)}/{to_string(node.right, prec + 1)}"
    elif isinstance(node, Pow):
        text = f"{to_string(node.base, 5)}^{node.exponent}"
    else:
        raise TypeError(f"not an expression node: {node!r}")
    if prec < parent_prec:
        return f"({text})"
    return text
