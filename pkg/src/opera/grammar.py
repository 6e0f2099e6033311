"""Parser for differential-polynomial expressions.

Accepted syntax: integers (rationals are written with ``/``), field symbols
``u<i>`` and ``u<i>_<k>`` (k-th derivative), primes as derivative shorthand
(``u1''``), a bare ``u`` meaning ``u1``, the variable ``z``, the parameters
``q, t, h``, and the operators ``+ - * / ^ ( )``.  ``**`` is read as ``^``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .coeffcore import ParamRational
from .jetring import JetPolynomial


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.message = message
        super().__init__(f"line {self.line}, column {self.column}: {message}")


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<sym>[A-Za-z][A-Za-z0-9_]*'*)
  | (?P<op>\*\*|[-+*/^()])
""", re.VERBOSE)

_FIELD = re.compile(r"^([a-z])(\d*)(?:_(\d+))?('*)$")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        if m.lastgroup != "ws":
            tok = m.group()
            toks.append(_Tok(m.lastgroup, "^" if tok == "**" else tok, pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, field_letters: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.field_letters = field_letters

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, tok.pos)

    def parse(self) -> JetPolynomial:
        if self.peek().kind == "end":
            self.fail("empty expression")
        value = self.expr()
        if self.peek().kind != "end":
            self.fail(f"unexpected {self.peek().text!r}")
        return value

    def expr(self) -> JetPolynomial:
        value = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> JetPolynomial:
        value = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op.text == "*":
                value = value * rhs
            else:
                value = value * self.invert(rhs, op)
        return value

    def invert(self, p: JetPolynomial, tok: _Tok) -> JetPolynomial:
        if len(p.terms) != 1:
            self.fail("can only divide by a single term free of fields", tok)
        (zp, vs), c = next(iter(p.terms.items()))
        if vs:
            self.fail("can only divide by a single term free of fields", tok)
        return JetPolynomial({(-zp, ()): Fraction(1) / c})

    def unary(self) -> JetPolynomial:
        if self.peek().text == "-":
            self.take()
            return -self.unary()
        if self.peek().text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> JetPolynomial:
        base = self.atom()
        if self.peek().text == "^":
            tok = self.take()
            sign = 1
            if self.peek().text in ("-", "+"):
                sign = -1 if self.take().text == "-" else 1
            num = self.take()
            if num.kind != "num":
                self.fail("exponent must be an integer", num)
            k = sign * int(num.text)
            if k < 0:
                return self.invert(base, tok) ** (-k)
            return base ** k
        return base

    def atom(self) -> JetPolynomial:
        tok = self.take()
        if tok.kind == "num":
            return JetPolynomial.const(int(tok.text))
        if tok.text == "(":
            value = self.expr()
            if self.take().text != ")":
                self.fail("expected ')'", self.toks[self.i - 1])
            return value
        if tok.kind == "sym":
            return self.symbol(tok)
        if tok.kind == "end":
            self.fail("unexpected end of input", tok)
        self.fail(f"unexpected {tok.text!r}", tok)

    def symbol(self, tok: _Tok) -> JetPolynomial:
        name = tok.text
        if name == "z":
            return JetPolynomial.z()
        if name in ("q", "t", "h"):
            return JetPolynomial.const(ParamRational.gen(name))
        m = _FIELD.match(name)
        if m and m.group(1) in self.field_letters:
            letter, idx, order, primes = m.groups()
            if order is not None and primes:
                self.fail("use either _k or primes, not both", tok)
            if name.endswith("_") or (order is None and "_" in name):
                self.fail("malformed derivative index", tok)
            field = int(idx) if idx else 1
            if field < 1:
                self.fail("field indices start at 1", tok)
            k = int(order) if order is not None else len(primes)
            return JetPolynomial.var(field, k)
        if "_" in name:
            raise ParseError(f"malformed derivative index in {name!r}", self.text, tok.pos + name.index("_"))
        self.fail(f"unknown symbol {name!r}", tok)


def parse_expression(text: str, field_letters: str = "u") -> JetPolynomial:
    """Parse ``text`` into a JetPolynomial; raises ParseError with position."""
    return _Parser(text, field_letters).parse()
