"""Recursive-descent parser for matrix-entry expressions in the time index ``k``.

Grammar (left-associative, usual precedence)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := number | "k" | "pi" | ident "(" expr ")" | "(" expr ")" | "-" factor
    ident  := sin | cos | exp

Unary minus lives in ``factor``, so ``-a*b`` parses as ``(-a)*b``.
Angles are radians.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

FUNCTIONS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}

# U+2212 is accepted as a minus sign.
_MINUS = ("-", "−")


class ExpressionError(ValueError):
    """Syntax or evaluation error; ``offset`` is a byte offset into the UTF-8 text."""

    def __init__(self, message: str, text: str = "", offset: int | None = None):
        self.text = text
        self.offset = offset
        if offset is not None:
            message = f"{message} at byte {offset} in {text!r}"
        super().__init__(message)


class UnknownIdentifierError(ExpressionError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Pi, Neg, BinOp, Call]

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def offset(self, pos: int | None = None) -> int:
        return len(self.text[: self.pos if pos is None else pos].encode("utf-8"))

    def fail(self, message: str, pos: int | None = None, cls=ExpressionError):
        raise cls(message, self.text, self.offset(pos))

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.peek() or "end of input"
            self.fail(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def parse(self) -> Node:
        if not self.text.strip():
            self.fail("empty expression", 0)
        node = self.expr()
        if self.peek():
            self.fail(f"unexpected {self.peek()!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                node = BinOp("+", node, self.term())
            elif ch in _MINUS:
                self.pos += 1
                node = BinOp("-", node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        ch = self.peek()
        if not ch:
            self.fail("unexpected end of input")
        if ch in _MINUS:
            self.pos += 1
            return Neg(self.factor())
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        m = _NUMBER.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return Num(float(m.group()))
        m = _IDENT.match(self.text, self.pos)
        if m:
            start, name = self.pos, m.group()
            self.pos = m.end()
            if name == "k":
                return Var()
            if name == "pi":
                return Pi()
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            self.fail(f"unknown identifier {name!r}", start, UnknownIdentifierError)
        self.fail(f"unexpected {ch!r}")


def parse_expression(text: str) -> Node:
    return _Parser(text).parse()


def evaluate(node: Node, k: float) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return float(k)
    if isinstance(node, Pi):
        return math.pi
    if isinstance(node, Neg):
        return -evaluate(node.operand, k)
    if isinstance(node, Call):
        try:
            return FUNCTIONS[node.func](evaluate(node.arg, k))
        except (OverflowError, ValueError) as exc:
            raise ExpressionError(f"{node.func} failed at k={k}: {exc}") from exc
    left, right = evaluate(node.left, k), evaluate(node.right, k)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right == 0.0:
        raise ExpressionError(f"division by zero at k={k}")
    return left / right


def to_source(node: Node) -> str:
    """Print ``node`` fully parenthesized so that it reparses to the same tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "k"
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Neg):
        return f"-({to_source(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    return f"({to_source(node.left)} {node.op} {to_source(node.right)})"


def evaluate_entry(entry, k: int) -> float:
    """Evaluate a schema entry: a number, or an expression string in ``k``."""
    if isinstance(entry, bool):
        raise ExpressionError(f"boolean {entry!r} is not a matrix entry")
    if isinstance(entry, (int, float)):
        return float(entry)
    if isinstance(entry, str):
        value = evaluate(parse_expression(entry), k)
        if not math.isfinite(value):
            raise ExpressionError(f"{entry!r} is not finite at k={k}")
        return value
    raise ExpressionError(f"entry {entry!r} is neither a number nor an expression")
