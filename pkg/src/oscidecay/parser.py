"""Recursive-descent parser for polynomial expressions.

Grammar (tightest binding last)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" INTEGER)?
    atom   := INTEGER | NAME | "sqrt" "(" INTEGER ")" | "(" expr ")"

So ``^`` binds tighter than unary minus, which binds tighter than ``*``:
``-x^2`` is ``-(x^2)``.  Division is only allowed by a nonzero constant,
which covers fraction literals such as ``-1/3``.  All irrational constants
in one expression must share a radicand.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .poly import MultiPoly
from .scalar import QuadExtScalar, split_square


class PolyParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} at column {position + 1}")


@dataclass(frozen=True)
class Token:
    kind: str  # 'int', 'name', 'op', 'end'
    value: str
    pos: int


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolyParseError(f"unexpected character {text[bad]!r}", bad, text)
        if m.group(1) is not None:
            tokens.append(Token("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(Token("name", m.group(2), m.start(2)))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(Token("op", op, m.start(3)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...], radicand: int | None):
        self.text = text
        self.vars = variables
        self.radicand = radicand
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        return PolyParseError(message, tok.pos, self.text)

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value or kind
            got = tok.value or "end of input"
            raise self.error(f"expected {want!r}, found {got!r}")
        return self.advance()

    def parse(self) -> MultiPoly:
        if self.peek().kind == "end":
            raise self.error("empty expression")
        result = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().value!r}")
        return result

    def expr(self) -> MultiPoly:
        left = self.term()
        while self.peek().kind == "op" and self.peek().value in "+-":
            op = self.advance().value
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self) -> MultiPoly:
        left = self.unary()
        while self.peek().kind == "op" and self.peek().value in "*/":
            tok = self.advance()
            right = self.unary()
            if tok.value == "*":
                left = left * right
            else:
                if not right.is_constant() or right.is_zero():
                    raise self.error("division only by a nonzero constant", tok)
                left = left / right
        return left

    def unary(self) -> MultiPoly:
        tok = self.peek()
        if tok.kind == "op" and tok.value in "+-":
            self.advance()
            inner = self.unary()
            return -inner if tok.value == "-" else inner
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().value == "^":
            self.advance()
            tok = self.peek()
            if tok.kind != "int":
                raise self.error("exponent must be a nonnegative integer literal")
            self.advance()
            return base ** int(tok.value)
        return base

    def atom(self) -> MultiPoly:
        tok = self.advance()
        if tok.kind == "int":
            return MultiPoly.constant(self.vars, int(tok.value))
        if tok.kind == "name":
            if tok.value == "sqrt":
                self.expect("op", "(")
                arg = self.expect("int")
                self.expect("op", ")")
                return MultiPoly.constant(self.vars, self._sqrt(int(arg.value), arg))
            if tok.value not in self.vars:
                raise self.error(f"unknown identifier {tok.value!r}", tok)
            return MultiPoly.variable(self.vars, tok.value)
        if tok.kind == "op" and tok.value == "(":
            inner = self.expr()
            self.expect("op", ")")
            return inner
        got = tok.value or "end of input"
        raise self.error(f"unexpected {got!r}", tok)

    def _sqrt(self, n: int, tok: Token) -> QuadExtScalar:
        s, k = split_square(n)
        if k == 1:
            return QuadExtScalar(s, 0, self.radicand or 2)
        if self.radicand is None:
            self.radicand = k
        elif self.radicand != k:
            raise self.error(
                f"mixed radicands: sqrt({n}) is outside Q(sqrt({self.radicand}))", tok)
        return QuadExtScalar(0, s, k)


def parse_polynomial(text: str, variables: Sequence[str], radicand: int | None = None) -> MultiPoly:
    """Parse ``text`` into a fully expanded :class:`MultiPoly` over ``variables``.

    ``radicand`` pins the admissible quadratic field; when omitted, the first
    ``sqrt`` encountered fixes it.
    """
    vs = tuple(variables)
    if "sqrt" in vs:
        raise ValueError("'sqrt' is reserved and cannot be a variable name")
    return _Parser(text, vs, radicand).parse()


def parse_scalar(text: str, radicand: int | None = None) -> QuadExtScalar:
    """Parse a constant expression such as ``-1/3`` or ``2*sqrt(2)``."""
    p = _Parser(str(text), (), radicand).parse()
    return p.constant_term()


_DNAME = re.compile(r"\bd([A-Za-z_][A-Za-z_0-9]*)")


def _operator_chunks(text: str) -> list[tuple[str, int]]:
    """Split at top level on whitespace and '*' between factors."""
    chunks, depth, start = [], 0, None
    for i, ch in enumerate(text + " "):
        if ch == "(":
            if depth == 0 and start is None:
                start = i
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise PolyParseError("unbalanced ')'", i, text)
            if depth == 0:
                chunks.append((text[start:i + 1], start))
                start = None
        elif depth == 0 and (ch.isspace() or ch == "*"):
            if start is not None:
                chunks.append((text[start:i], start))
                start = None
        elif start is None:
            start = i
    if depth:
        raise PolyParseError("unbalanced '('", len(text), text)
    return chunks


def parse_operator(text: str, variables: Sequence[str], radicand: int | None = None):
    """Parse a product of directional derivatives such as ``dx dy (dx - dy)``.

    Each factor is ``dNAME`` or a parenthesised linear combination of them
    with scalar coefficients, e.g. ``(dy + dz)`` or ``(sqrt(2)*dx - dz)``.
    """
    from .nondegeneracy import DiffOperator

    vs = tuple(variables)
    directions = []
    chunks = _operator_chunks(text)
    if not chunks:
        raise PolyParseError("empty operator", 0, text)
    for chunk, pos in chunks:
        for m in _DNAME.finditer(chunk):
            if m.group(1) not in vs:
                raise PolyParseError(f"unknown derivative {m.group(0)!r}", pos + m.start(), text)
        plain = _DNAME.sub(lambda m: " " + m.group(1), chunk)
        try:
            p = parse_polynomial(plain, vs, radicand)
        except PolyParseError as exc:
            raise PolyParseError(exc.message, pos + min(exc.position, len(chunk) - 1), text) from None
        if p.is_zero() or p.degree() != 1 or p.constant_term():
            raise PolyParseError("each factor must be a nonzero combination of derivatives", pos, text)
        directions.append(tuple(p.coefficient(tuple(int(i == k) for i in range(len(vs))))
                                for k in range(len(vs))))
    return DiffOperator(vs, tuple(directions))
