"""Exact arithmetic in the rational function field Q(q).

A :class:`Scalar` is stored as a reduced fraction of integer polynomials in
``q``.  The representation is canonical (coprime numerator and denominator,
denominator with positive leading coefficient) so equality and hashing are
structural.  Polynomial gcds are delegated to FLINT.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

from flint import fmpz_poly

from .errors import ParseError, PoleError

__all__ = [
    "Scalar",
    "ZERO",
    "ONE",
    "Q",
    "qpow",
    "q_integer",
    "q_factorial",
    "specialize_q1",
    "as_scalar",
]

_P_ONE = fmpz_poly([1])
_P_ZERO = fmpz_poly([])

Coercible = Union["Scalar", int, Fraction]


class Scalar:
    """Element of Q(q) in lowest terms."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=1, *, _reduced: bool = False):
        if not isinstance(num, fmpz_poly):
            num = _to_poly(num)
        if not isinstance(den, fmpz_poly):
            den = _to_poly(den)
        if not _reduced:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            if num.is_zero():
                den = _P_ONE
            elif not den.is_one():
                g = num.gcd(den)
                if not g.is_one():
                    num = num // g
                    den = den // g
                if den.leading_coefficient() < 0:
                    num = -num
                    den = -den
        self.num = num
        self.den = den
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def from_fraction(cls, value: Fraction) -> "Scalar":
        return cls(fmpz_poly([value.numerator]), fmpz_poly([value.denominator]))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = as_scalar(other)
        if self.den.is_one() and other.den.is_one():
            return Scalar(self.num + other.num, _P_ONE, _reduced=True)
        if self.den == other.den:
            return Scalar(self.num + other.num, self.den)
        return Scalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-as_scalar(other))

    def __rsub__(self, other):
        return as_scalar(other) + (-self)

    def __mul__(self, other):
        other = as_scalar(other)
        if self.den.is_one() and other.den.is_one():
            return Scalar(self.num * other.num, _P_ONE, _reduced=True)
        return Scalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar(self.den, self.num)

    def __truediv__(self, other):
        return self * as_scalar(other).inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return Scalar(self.num**n, self.den**n, _reduced=True)

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_integer(self) -> bool:
        return self.den.is_one() and self.num.degree() <= 0

    def monomial(self):
        """Return ``(c, k)`` when the scalar equals ``c * q**k`` with integer c, else None."""
        num, den = self.num, self.den
        if num.is_zero():
            return None
        nc = [int(c) for c in num.coeffs()]
        dc = [int(c) for c in den.coeffs()]
        nz = [i for i, c in enumerate(nc) if c]
        dz = [i for i, c in enumerate(dc) if c]
        if len(nz) != 1 or len(dz) != 1 or dc[dz[0]] != 1:
            return None
        return nc[nz[0]], nz[0] - dz[0]

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self == as_scalar(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(int(c) for c in self.num.coeffs()),
                               tuple(int(c) for c in self.den.coeffs())))
        return self._hash

    # evaluation -----------------------------------------------------------
    def at_q1(self) -> Fraction:
        d = sum(int(c) for c in self.den.coeffs())
        if d == 0:
            raise PoleError(f"{self} has a pole at q = 1")
        return Fraction(sum(int(c) for c in self.num.coeffs()), d)

    def substitute(self, value: Fraction) -> Fraction:
        """Evaluate at a rational point (used by tests as an independent check)."""
        d = _eval(self.den, value)
        if d == 0:
            raise PoleError(f"{self} has a pole at q = {value}")
        return _eval(self.num, value) / d

    # text -----------------------------------------------------------------
    def __str__(self):
        if self.den.is_one():
            return _poly_str(self.num)
        return f"({_poly_str(self.num)})/({_poly_str(self.den)})"

    def __repr__(self):
        return f"Scalar({self})"

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        return _Parser(text).parse()


def _to_poly(value) -> fmpz_poly:
    if isinstance(value, int):
        return fmpz_poly([value])
    if isinstance(value, (list, tuple)):
        return fmpz_poly(list(value))
    raise TypeError(f"cannot build a polynomial from {value!r}")


def _eval(p: fmpz_poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed([int(c) for c in p.coeffs()]):
        acc = acc * x + c
    return acc


def _poly_str(p: fmpz_poly) -> str:
    coeffs = [int(c) for c in p.coeffs()]
    if not coeffs:
        return "0"
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = "q" if k == 1 else f"q^{k}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += sign + body
    return out


def as_scalar(value: Coercible) -> Scalar:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return Scalar(fmpz_poly([value]), _P_ONE, _reduced=True)
    if isinstance(value, Fraction):
        return Scalar.from_fraction(value)
    if isinstance(value, str):
        return Scalar.parse(value)
    raise TypeError(f"cannot coerce {value!r} to Scalar")


ZERO = Scalar(_P_ZERO, _P_ONE, _reduced=True)
ONE = Scalar(_P_ONE, _P_ONE, _reduced=True)
Q = Scalar(fmpz_poly([0, 1]), _P_ONE, _reduced=True)

_QPOW_CACHE: dict[int, Scalar] = {}


def qpow(k: int) -> Scalar:
    """The Laurent monomial q**k."""
    s = _QPOW_CACHE.get(k)
    if s is None:
        if k >= 0:
            s = Scalar(fmpz_poly([0] * k + [1]), _P_ONE, _reduced=True)
        else:
            s = Scalar(_P_ONE, fmpz_poly([0] * (-k) + [1]), _reduced=True)
        _QPOW_CACHE[k] = s
    return s


def q_integer(n: int, d: int = 1) -> Scalar:
    """[n]_d = (q^{dn} - q^{-dn}) / (q^d - q^{-d})."""
    if d < 1:
        raise ValueError("symmetrizer d must be >= 1")
    return (qpow(d * n) - qpow(-d * n)) / (qpow(d) - qpow(-d))


def q_factorial(n: int, d: int = 1) -> Scalar:
    if n < 0:
        raise ValueError("q_factorial needs n >= 0")
    out = ONE
    for k in range(1, n + 1):
        out = out * q_integer(k, d)
    return out


def specialize_q1(s: Scalar) -> Fraction:
    return as_scalar(s).at_q1()


# --- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|(\*\*|[-+*/^()]))")


class _Parser:
    """Recursive descent over: expr := term (('+'|'-') term)*, with ^ for powers."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"bad scalar syntax at offset {pos}: {text!r}")
            num, var, op = m.groups()
            if num is not None:
                self.tokens.append(("num", int(num)))
            elif var is not None:
                self.tokens.append(("q", None))
            else:
                self.tokens.append(("op", "^" if op == "**" else op))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> Scalar:
        if not self.tokens:
            raise ParseError("empty scalar expression")
        val = self.expr()
        if self.i != len(self.tokens):
            raise ParseError(f"trailing input in scalar {self.text!r}")
        return val

    def expr(self):
        kind, val = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def term(self):
        acc = self.power()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.power()
                acc = acc * rhs if val == "*" else acc / rhs
            elif kind in ("num", "q") or (kind == "op" and val == "("):
                acc = acc * self.power()
            else:
                return acc

    def power(self):
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
            kind, val = self.take()
            if kind != "num":
                raise ParseError(f"exponent must be an integer in {self.text!r}")
            return base ** (sign * val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return as_scalar(val)
        if kind == "q":
            return Q
        if kind == "op" and val == "(":
            inner = self.expr()
            kind, val = self.take()
            if (kind, val) != ("op", ")"):
                raise ParseError(f"unbalanced parentheses in {self.text!r}")
            return inner
        if kind == "op" and val == "-":
            return -self.atom()
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")
