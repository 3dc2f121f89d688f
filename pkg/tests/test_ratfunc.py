from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from gmanifolds import linalg
from gmanifolds.calculus import Chart
from gmanifolds.ratfunc import ExpressionError, RationalFunction

from strategies import polynomials, rational_functions

CH = Chart(["x", "y", "z"])
SYM = sympy.symbols("x y z")


def to_sympy(f: RationalFunction):
    return sympy.sympify(str(f).replace("^", "**"), locals=dict(zip("xyz", SYM)))


def same(f: RationalFunction, expr) -> bool:
    return sympy.simplify(to_sympy(f) - expr) == 0


def test_parse_and_canonical_form():
    f = CH.parse("(x^2 - y^2)/(x - y)")
    assert f == CH.parse("x + y")
    assert f.is_polynomial()
    assert str(CH.parse("2*x/4")) == str(CH.parse("x/2"))
    assert CH.parse("1/(2*x)").den == CH.parse("x").num


@pytest.mark.parametrize("text", ["1/(x-x)", "x/(y - y)", "(1 + x)/0"])
def test_zero_denominator_rejected(text):
    with pytest.raises(ExpressionError, match="zero denominator"):
        CH.parse(text)


@pytest.mark.parametrize("text", ["x +", "2^y", "w + 1", "x $ y", ""])
def test_bad_expressions(text):
    with pytest.raises(ExpressionError):
        CH.parse(text)


def test_evaluate_exact_and_float():
    f = CH.parse("(x + y)/(z - 1)")
    assert f.evaluate([1, 2, 3]) == Fraction(3, 2)
    assert f.evaluate([1.0, 2.0, 3.0]) == pytest.approx(1.5)
    with pytest.raises(ZeroDivisionError):
        f.evaluate([0, 0, 1])


def test_compose_and_diff():
    f = CH.parse("x*y/(1 + z^2)")
    assert same(f.diff(2), SYM[0] * SYM[1] * sympy.diff(1 / (1 + SYM[2] ** 2), SYM[2]))
    g = f.compose([CH.parse("y"), CH.parse("x"), CH.parse("0")])
    assert g == CH.parse("x*y")


@given(rational_functions(CH), rational_functions(CH))
def test_field_arithmetic_matches_sympy(f, g):
    a, b = to_sympy(f), to_sympy(g)
    assert same(f + g, a + b)
    assert same(f * g, a * b)
    if not g.is_zero():
        assert same(f / g, a / b)


@given(rational_functions(CH))
def test_string_round_trip(f):
    assert CH.parse(str(f)) == f


@given(polynomials(CH), polynomials(CH), st.integers(0, 2))
def test_leibniz(f, g, i):
    assert (f * g).diff(i) == f.diff(i) * g + f * g.diff(i)


def test_linalg_basics():
    A = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
    assert linalg.rank(A) == 1
    ns = linalg.nullspace(A, 2)
    assert len(ns) == 1 and linalg.matmul(A, [[v] for v in ns[0]]) == [[0], [0]]
    assert linalg.solve(A, [Fraction(1), Fraction(3)]) is None
    B = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    assert linalg.matmul(B, linalg.inverse(B)) == [[1, 0], [0, 1]]


def test_linalg_over_rational_functions():
    one = CH.one()
    x = CH.var(0)
    M = [[one, x], [CH.zero(), one]]
    inv = linalg.inverse(M, one)
    assert inv == [[one, -x], [CH.zero(), one]]
