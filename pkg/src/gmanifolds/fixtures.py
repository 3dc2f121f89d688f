"""Built-in algebras, actions, forms and bundles used by tests and scenarios."""

from __future__ import annotations

from functools import lru_cache

from .action import GAction
from .calculus import Chart, Form, VectorField, algebra_kind, form_from_literal
from .connection import ConnectionForm, LocalBundle
from .lie import LieAlgebra


def _fields(chart: Chart, rows):
    return [VectorField(chart, [chart.parse(str(c)) for c in row]) for row in rows]


def g_form(chart: Chart, algebra: LieAlgebra, literal: dict) -> Form:
    """Build a g-valued form from {basis label: {monomial: expr}} (monomials like 'dx', 'dx^dy', '1')."""
    return form_from_literal(chart, literal, algebra_kind(algebra))


@lru_cache(maxsize=None)
def heis3_algebra() -> LieAlgebra:
    rep = [
        [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 0, 1], [0, 0, 0]],
        [[0, 0, 1], [0, 0, 0], [0, 0, 0]],
    ]
    return LieAlgebra.from_brackets(["e1", "e2", "e3"], {(0, 1): {2: 1}}, matrix_rep=rep, name="heis3")


@lru_cache(maxsize=None)
def sl2_algebra() -> LieAlgebra:
    rep = [[[0, 1], [0, 0]], [[1, 0], [0, -1]], [[0, 0], [1, 0]]]
    return LieAlgebra.from_brackets(
        ["e", "h", "f"], {(1, 0): {0: 2}, (1, 2): {2: -2}, (0, 2): {1: 1}}, matrix_rep=rep, name="sl2"
    )


@lru_cache(maxsize=None)
def aff1_algebra() -> LieAlgebra:
    rep = [[[0, 1], [0, 0]], [[0, 0], [0, 1]]]
    return LieAlgebra.from_brackets(["e1", "e2"], {(0, 1): {0: 1}}, matrix_rep=rep, name="aff1")


@lru_cache(maxsize=None)
def line_algebra() -> LieAlgebra:
    return LieAlgebra(["e1"], [[[0]]], matrix_rep=[[[0]]], name="R")


@lru_cache(maxsize=None)
def heis3() -> GAction:
    chart = Chart(["x", "y", "z"])
    return GAction(heis3_algebra(), chart, _fields(chart, [[1, 0, 0], [0, 1, "x"], [0, 0, 1]]), name="HEIS3")


@lru_cache(maxsize=None)
def heis3_dual() -> GAction:
    A = heis3()
    return GAction(A.algebra, A.chart, _fields(A.chart, [[1, 0, "y"], [0, 1, 0], [0, 0, 1]]), name="HEIS3 dual")


@lru_cache(maxsize=None)
def sl2r() -> GAction:
    chart = Chart(["x"])
    return GAction(sl2_algebra(), chart, _fields(chart, [[1], ["-2*x"], ["-x^2"]]), name="SL2R")


@lru_cache(maxsize=None)
def aff1() -> GAction:
    chart = Chart(["x"])
    return GAction(aff1_algebra(), chart, _fields(chart, [[1], ["x"]]), name="AFF1")


@lru_cache(maxsize=None)
def rot2() -> GAction:
    chart = Chart(["x", "y"], excluded_locus=["x^2+y^2"])
    return GAction(line_algebra(), chart, _fields(chart, [["-y", "x"]]), name="ROT2")


@lru_cache(maxsize=None)
def transz() -> GAction:
    chart = Chart(["x", "y", "z"])
    return GAction(line_algebra(), chart, _fields(chart, [[0, 0, 1]]), name="TRANSZ")


def heis3_kappa() -> Form:
    A = heis3()
    return g_form(A.chart, A.algebra, {"e1": {"dx": "1"}, "e2": {"dy": "1"}, "e3": {"dz": "1", "dy": "-x"}})


def transz_omega() -> ConnectionForm:
    A = transz()
    return ConnectionForm(A, g_form(A.chart, A.algebra, {"e1": {"dz": "1", "dx": "-y"}}))


def rot2_omega() -> ConnectionForm:
    A = rot2()
    return ConnectionForm(A, g_form(A.chart, A.algebra, {"e1": {"dx": "-y/(x^2+y^2)", "dy": "x/(x^2+y^2)"}}))


def heis3_omega() -> ConnectionForm:
    return ConnectionForm(heis3(), heis3_kappa())


def aff1_omega() -> ConnectionForm:
    A = aff1()
    return ConnectionForm(A, g_form(A.chart, A.algebra, {"e1": {"dx": "1"}}))


@lru_cache(maxsize=None)
def line_fiber(var: str = "s") -> GAction:
    chart = Chart([var])
    return GAction(line_algebra(), chart, _fields(chart, [[1]]), name=f"translations of {var}")


def bund1() -> LocalBundle:
    base = Chart(["x", "y"])
    return LocalBundle(base, line_fiber("s"), {"x": ["-y"]}, name="BUND1")


def bundle(base_vars, christoffel: dict, fiber_var: str = "s", name: str = "") -> LocalBundle:
    """Line bundle with translation fiber and Christoffel components given as expressions."""
    base = Chart(list(base_vars))
    return LocalBundle(base, line_fiber(fiber_var), {k: [v] for k, v in christoffel.items()}, name=name)


def heisenberg_group() -> "MatrixGroupChart":
    """Upper unitriangular 3x3 matrices with coordinates (a, b, c) = (g12, g23, g13)."""
    from .homogeneous import MatrixGroupChart

    chart = Chart(["a", "b", "c"])
    g = [["1", "a", "c"], ["0", "1", "b"], ["0", "0", "1"]]
    ginv = [["1", "-a", "a*b-c"], ["0", "1", "-b"], ["0", "0", "1"]]
    return MatrixGroupChart(heis3_algebra(), chart, g, ginv, [0, 0, 0], entry_coords=[(0, 1), (1, 2), (0, 2)])


@lru_cache(maxsize=None)
def heis_coset() -> GAction:
    """Heisenberg action on the cosets of its centre, chart (a, b)."""
    chart = Chart(["a", "b"])
    return GAction(heis3_algebra(), chart, _fields(chart, [[1, 0], [0, 1], [0, 0]]), name="HEIS3 mod centre")
