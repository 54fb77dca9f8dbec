"""Text syntax for noncommutative polynomials, e.g. ``"x*y - q^2*y*x - (q-q^-1)"``.

Juxtaposition and ``*`` both multiply (noncommutatively).  ``q`` is the
deformation parameter unless it is declared as a generator.  Division and
negative powers are allowed only on scalars.
"""
from __future__ import annotations

import re

from .engine import Element
from .errors import ParseError
from .scalars import Q, Scalar

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokens(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r} at column {pos + 1} in {text!r}")
        num, name, op = m.groups()
        out.append(("num", int(num)) if num else ("name", name) if name else ("op", "^" if op == "**" else op))
        pos = m.end()
    return out


def _scalar_of(e: Element):
    if not e.terms:
        return Scalar(0)
    if set(e.terms) == {()}:
        return e.terms[()]
    return None


class _Parser:
    def __init__(self, text: str, generators):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0
        self.gens = set(generators)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def fail(self, msg):
        raise ParseError(f"{msg} in {self.text!r}")

    def parse(self) -> Element:
        if not self.toks:
            self.fail("empty expression")
        e = self.expr()
        if self.i != len(self.toks):
            self.fail(f"trailing input at token {self.i + 1}")
        return e

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        acc = self.term().scale(sign)
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.power()
        while True:
            kind, val = self.peek()
            if (kind, val) == ("op", "*"):
                self.take()
                acc = acc * self.power()
            elif (kind, val) == ("op", "/"):
                self.take()
                d = _scalar_of(self.power())
                if d is None:
                    self.fail("division by a non-scalar")
                if not d:
                    self.fail("division by zero")
                acc = acc.scale(d.inverse())
            elif kind in ("num", "name") or (kind, val) == ("op", "("):
                acc = acc * self.power()
            else:
                return acc

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, val = self.take()
            if kind != "num":
                self.fail("exponent must be an integer")
            n = sign * val
            s = _scalar_of(base)
            if s is not None:
                if n < 0 and not s:
                    self.fail("zero to a negative power")
                return Element.scalar(s ** n)
            if n < 0:
                self.fail("negative power of a non-scalar")
            out = Element.scalar(1)
            for _ in range(n):
                out = out * base
            return out
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return Element.scalar(val)
        if kind == "name":
            if val in self.gens:
                return Element.gen(val)
            if val == "q":
                return Element.scalar(Q)
            self.fail(f"unknown generator {val!r}")
        if (kind, val) == ("op", "("):
            e = self.expr()
            if self.take() != ("op", ")"):
                self.fail("missing ')'")
            return e
        self.fail(f"unexpected token {val!r}")


def parse_element(text: str, generators) -> Element:
    return _Parser(text, generators).parse()
