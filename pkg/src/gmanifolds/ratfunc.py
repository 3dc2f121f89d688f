"""Exact multivariate rational functions over Q.

Numerators and denominators are sparse polynomials from ``sympy.polys.rings``
with graded-lex order.  Every value is kept in a canonical form (coprime,
denominator monic w.r.t. grlex) so that ``==`` is mathematical equality.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing, ring


class ExpressionError(ValueError):
    """Raised for malformed expressions; carries the offending position."""

    def __init__(self, message: str, position: int | None = None, text: str = ""):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


@lru_cache(maxsize=None)
def poly_ring(names: tuple[str, ...]) -> PolyRing:
    if not names:
        raise ValueError("a chart needs at least one variable")
    return ring(",".join(names), QQ, grlex)[0]


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    # gmpy2.mpq and sympy rationals expose numerator/denominator
    num = getattr(value, "numerator", None)
    den = getattr(value, "denominator", None)
    if num is not None and den is not None:
        return Fraction(int(num), int(den))
    raise TypeError(f"not an exact rational: {value!r}")


class RationalFunction:
    """A canonical quotient ``num/den`` of polynomials in one chart's variables."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: PolyElement, den: PolyElement | None = None, *, _canonical=False):
        if den is None:
            den = num.ring.one
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, names: Sequence[str], value) -> RationalFunction:
        R = poly_ring(tuple(names))
        return cls(R(QQ.convert(to_fraction(value))), R.one, _canonical=True)

    @classmethod
    def variable(cls, names: Sequence[str], name: str) -> RationalFunction:
        R = poly_ring(tuple(names))
        return cls(R.gens[list(names).index(name)], R.one, _canonical=True)

    @classmethod
    def parse(cls, text: str, names: Sequence[str]) -> RationalFunction:
        return _Parser(text, tuple(names)).parse()

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(str(s) for s in self.ring.symbols)

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return self.den == self.ring.one

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return to_fraction(self.num.LC if self.num else 0) / to_fraction(self.den.LC)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> RationalFunction:
        if isinstance(other, RationalFunction):
            if other.ring != self.ring:
                raise ValueError("rational functions live on different charts")
            return other
        if isinstance(other, (int, Fraction, Rational)):
            R = self.ring
            return RationalFunction(R(QQ.convert(to_fraction(other))), R.one, _canonical=True)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den, _canonical=self.den == self.ring.one)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return RationalFunction(self.ring.zero, self.ring.one, _canonical=True)
        one = self.ring.one
        if self.den == one and other.den == one:
            return RationalFunction(self.num * other.num, one, _canonical=True)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("only integer exponents")
        if exponent < 0:
            return (RationalFunction(self.den, self.num)) ** (-exponent)
        return RationalFunction(self.num**exponent, self.den**exponent, _canonical=True)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.ring == other.ring and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # calculus -----------------------------------------------------------------
    def diff(self, index: int) -> RationalFunction:
        x = self.ring.gens[index]
        dn = self.num.diff(x)
        if self.den == self.ring.one:
            return RationalFunction(dn, self.den, _canonical=True)
        dd = self.den.diff(x)
        return RationalFunction(dn * self.den - self.num * dd, self.den**2)

    def compose(self, values: Sequence[RationalFunction]) -> RationalFunction:
        """Substitute ``values[i]`` for the i-th variable (values may live on another chart)."""
        if len(values) != self.ring.ngens:
            raise ValueError("substitution needs one value per variable")
        target = values[0]
        num = _eval_poly(self.num, values, target)
        den = _eval_poly(self.den, values, target)
        if den.is_zero():
            raise ZeroDivisionError("denominator vanishes identically after substitution")
        return num / den

    def evaluate(self, point: Sequence):
        """Exact value at a rational point; float value at a float point."""
        if all(isinstance(v, (int, Fraction)) for v in point):
            pt = [Fraction(v) for v in point]
            d = _eval_poly_numeric(self.den, pt)
            if d == 0:
                raise ZeroDivisionError(f"denominator of {self} vanishes at {tuple(point)}")
            return _eval_poly_numeric(self.num, pt) / d
        pt = [float(v) for v in point]
        d = _eval_poly_numeric(self.den, pt)
        if d == 0.0:
            raise ZeroDivisionError(f"denominator of {self} vanishes at {tuple(point)}")
        return _eval_poly_numeric(self.num, pt) / d

    def degree(self) -> int:
        """Max of numerator and denominator total degree."""
        return max(_total_degree(self.num), _total_degree(self.den))

    # printing ------------------------------------------------------------------
    def __str__(self):
        num = format_poly(self.num)
        if self.den == self.ring.one:
            return num
        return f"({num})/({format_poly(self.den)})"

    def __repr__(self):
        return f"RationalFunction({self})"


def _canonicalize(num: PolyElement, den: PolyElement):
    R = num.ring
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return R.zero, R.one
    if den.is_ground:
        return num.quo_ground(den.LC), R.one
    num, den = num.cancel(den)
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return num, den


def _total_degree(p: PolyElement) -> int:
    if not p:
        return 0
    return max(sum(m) for m in p.keys())


def _eval_poly(p: PolyElement, values: Sequence[RationalFunction], like: RationalFunction):
    result = like * 0
    powers: dict[tuple[int, int], RationalFunction] = {}
    for monom, coeff in p.terms():
        term = like * 0 + to_fraction(coeff)
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = values[i] ** e
                term = term * powers[key]
        result = result + term
    return result


def _eval_poly_numeric(p: PolyElement, point):
    total = point[0] * 0 if point else 0
    for monom, coeff in p.terms():
        c = to_fraction(coeff) if isinstance(total, Fraction) else float(to_fraction(coeff))
        for v, e in zip(point, monom):
            if e:
                c = c * v**e
        total = total + c
    return total


def format_poly(p: PolyElement) -> str:
    if not p:
        return "0"
    names = [str(s) for s in p.ring.symbols]
    pieces = []
    for monom, coeff in p.terms():
        c = to_fraction(coeff)
        factors = []
        for name, e in zip(names, monom):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mag = abs(c)
        if not factors:
            body = _format_rational(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _format_rational(mag) + "*" + "*".join(factors)
        pieces.append(("-" if c < 0 else "+", body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class _Parser:
    """Recursive descent for ``+ - * / ^``, integers, variables and parentheses."""

    def __init__(self, text: str, names: tuple[str, ...]):
        self.text = text
        self.names = names
        self.pos = 0
        R = poly_ring(names)
        self.one = RationalFunction(R.one, R.one, _canonical=True)

    def error(self, msg, pos=None):
        raise ExpressionError(msg, self.pos if pos is None else pos, self.text)

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> RationalFunction:
        if not self.text.strip():
            self.error("empty expression")
        value = self.expr()
        if self.peek():
            self.error(f"unexpected character {self.peek()!r}")
        return value

    def expr(self):
        if self.peek() in ("+", "-"):
            sign = self.text[self.pos]
            self.pos += 1
            value = self.term()
            if sign == "-":
                value = -value
        else:
            value = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.power()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            start = self.pos
            self.pos += 1
            rhs = self.power()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    self.error("zero denominator after canonicalization", start)
                value = value / rhs
        return value

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self.peek()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                self.error("exponent must be a nonnegative integer", start)
            base = base ** int(self.text[start:self.pos])
        return base

    def atom(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return value
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            return self.one * int(self.text[start:self.pos])
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            if name not in self.names:
                self.error(f"unknown variable {name!r}", start)
            return RationalFunction.variable(self.names, name)
        if not ch:
            self.error("unexpected end of expression")
        self.error(f"unexpected character {ch!r}")


def rf_zero(names: Iterable[str]) -> RationalFunction:
    return RationalFunction.constant(tuple(names), 0)


def rf_one(names: Iterable[str]) -> RationalFunction:
    return RationalFunction.constant(tuple(names), 1)
