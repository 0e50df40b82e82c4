"""
Closed expression language for conformal factors.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "pi" | "x1" | "x2" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := sin | cos | exp | sqrt

Evaluation is vectorised over numpy arrays; nothing is handed to ``eval``.
"""

import math
import re
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from systolic_finsler.errors import ExpressionSyntaxError

Evaluator = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]

FUNCTIONS: dict[str, Callable[[NDArray[np.float64]], NDArray[np.float64]]] = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
}

_TOKEN = re.compile(r"\s*(?:(?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        match = _TOKEN.match(source, pos)
        if match is None or match.end() == pos:
            bad = pos + len(source[pos:]) - len(source[pos:].lstrip())
            msg = f"unexpected character {source[bad]!r}"
            raise ExpressionSyntaxError(msg, position=bad, source=source)
        kind = match.lastgroup or "op"
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), start))
        pos = match.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str) -> None:
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _error(self, message: str, token: Token | None = None) -> ExpressionSyntaxError:
        token = token or self.current
        return ExpressionSyntaxError(message, position=token.position, source=self.source)

    def _advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def _expect(self, text: str) -> None:
        if self.current.text != text:
            found = self.current.text or "end of input"
            raise self._error(f"expected {text!r}, found {found!r}")
        self._advance()

    def parse(self) -> Evaluator:
        node = self.expr()
        if self.current.kind != "end":
            raise self._error(f"unexpected {self.current.text!r}")
        return node

    def expr(self) -> Evaluator:
        node = self.term()
        while self.current.text in {"+", "-"}:
            op = self._advance().text
            node = _binary(op, node, self.term())
        return node

    def term(self) -> Evaluator:
        node = self.unary()
        while self.current.text in {"*", "/"}:
            op = self._advance().text
            node = _binary(op, node, self.unary())
        return node

    def unary(self) -> Evaluator:
        if self.current.text == "-":
            self._advance()
            inner = self.unary()
            return lambda x1, x2: -inner(x1, x2)
        if self.current.text == "+":
            self._advance()
            return self.unary()
        return self.power()

    def power(self) -> Evaluator:
        base = self.atom()
        if self.current.text == "^":
            self._advance()
            return _binary("^", base, self.unary())
        return base

    def atom(self) -> Evaluator:
        token = self.current
        if token.kind == "number":
            self._advance()
            value = float(token.text)
            return lambda x1, x2: np.full(np.broadcast(x1, x2).shape, value)
        if token.kind == "name":
            self._advance()
            if token.text == "pi":
                return lambda x1, x2: np.full(np.broadcast(x1, x2).shape, math.pi)
            if token.text == "x1":
                return lambda x1, x2: np.broadcast_to(x1, np.broadcast(x1, x2).shape).astype(float)
            if token.text == "x2":
                return lambda x1, x2: np.broadcast_to(x2, np.broadcast(x1, x2).shape).astype(float)
            if token.text in FUNCTIONS:
                fn = FUNCTIONS[token.text]
                self._expect("(")
                inner = self.expr()
                self._expect(")")
                return lambda x1, x2: fn(inner(x1, x2))
            raise self._error(f"unknown name {token.text!r}", token)
        if token.text == "(":
            self._advance()
            inner = self.expr()
            self._expect(")")
            return inner
        found = token.text or "end of input"
        raise self._error(f"unexpected {found!r}")


def _binary(op: str, left: Evaluator, right: Evaluator) -> Evaluator:
    if op == "+":
        return lambda x1, x2: left(x1, x2) + right(x1, x2)
    if op == "-":
        return lambda x1, x2: left(x1, x2) - right(x1, x2)
    if op == "*":
        return lambda x1, x2: left(x1, x2) * right(x1, x2)
    if op == "/":
        return lambda x1, x2: left(x1, x2) / right(x1, x2)
    return lambda x1, x2: np.power(left(x1, x2), right(x1, x2))


class Expression:
    """Parsed scalar function of ``(x1, x2)``."""

    def __init__(self, source: str) -> None:
        self.source = source
        self._evaluate = _Parser(source).parse()

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"

    def evaluate(self, x1: ArrayLike, x2: ArrayLike) -> NDArray[np.float64]:
        a, b = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
        with np.errstate(all="ignore"):
            value = np.asarray(self._evaluate(a, b), dtype=float)
        return np.broadcast_to(value, a.shape).copy()

    def __call__(self, points: ArrayLike) -> NDArray[np.float64]:
        """Evaluate at points of shape ``(..., 2)``."""
        pts = np.asarray(points, dtype=float)
        return self.evaluate(pts[..., 0], pts[..., 1])


def parse_expression(source: str) -> Expression:
    return Expression(source)
