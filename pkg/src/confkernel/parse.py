"""Recursive-descent parser for the ASCII polynomial expression grammar.

    expr     := ['+'|'-'] term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := atom ('^' uint)?
    atom     := rational | ident | '(' expr ')'
    rational := int ('/' posint)?

A leading sign on an expression is accepted as a convenience so that the
output of ``str(Polynomial)`` always parses back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .poly import Polynomial, Ring

MAX_EXPONENT = 512

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownIdentifierError(ParseError):
    pass


class ExponentOverflowError(ParseError):
    pass


@dataclass
class _Tok:
    kind: str  # "int", "ident", "op", "end"
    value: str
    pos: int


def tokenize(text: str) -> list:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:  # trailing whitespace
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            toks.append(_Tok("int", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(_Tok("ident", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            toks.append(_Tok("op", ch, start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ring: Ring):
        self.text = text
        self.ring = ring
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str) -> _Tok:
        t = self.take()
        if t.kind != "op" or t.value != value:
            found = t.value or "end of input"
            raise ParseError(f"expected {value!r}, found {found!r}", t.pos, self.text)
        return t

    def parse(self) -> Polynomial:
        if self.peek().kind == "end":
            raise ParseError("empty expression", 0, self.text)
        p = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.value!r}", t.pos, self.text)
        return p

    def expr(self) -> Polynomial:
        sign = 1
        t = self.peek()
        if t.kind == "op" and t.value in "+-":
            self.take()
            sign = -1 if t.value == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            t = self.peek()
            if t.kind == "op" and t.value in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t.value == "+" else acc - rhs
            else:
                return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while self.peek().kind == "op" and self.peek().value == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Polynomial:
        base = self.atom()
        t = self.peek()
        if t.kind == "op" and t.value == "^":
            self.take()
            e = self.take()
            if e.kind != "int":
                raise ParseError("expected non-negative integer exponent", e.pos, self.text)
            k = int(e.value)
            if k > MAX_EXPONENT:
                raise ExponentOverflowError(f"exponent {k} exceeds {MAX_EXPONENT}", e.pos, self.text)
            return base ** k
        return base

    def atom(self) -> Polynomial:
        t = self.take()
        if t.kind == "int":
            num = int(t.value)
            nt = self.peek()
            if nt.kind == "op" and nt.value == "/":
                self.take()
                d = self.take()
                if d.kind != "int" or int(d.value) == 0:
                    raise ParseError("expected positive integer denominator", d.pos, self.text)
                return self.ring.const(Fraction(num, int(d.value)))
            return self.ring.const(num)
        if t.kind == "ident":
            if t.value not in self.ring:
                raise UnknownIdentifierError(f"unknown identifier {t.value!r}", t.pos, self.text)
            return self.ring.var(t.value)
        if t.kind == "op" and t.value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        found = t.value or "end of input"
        raise ParseError(f"unexpected {found!r}", t.pos, self.text)


def parse(text: str, ring: Ring) -> Polynomial:
    """Parse ``text`` into a polynomial over ``ring``."""
    return _Parser(text, ring).parse()
