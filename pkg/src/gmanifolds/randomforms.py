"""Seeded random generators for polynomial forms, used by batch checks and tests."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Sequence

from .action import GAction
from .brackets import tangent_tensor
from .calculus import SCALAR, Chart, Form, ValueKind, VectorField, algebra_kind, all_index_tuples
from .connection import ConnectionForm
from .ratfunc import RationalFunction


def random_coefficient(rng: random.Random, bound: int = 3) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, 2))


def random_polynomial(
    chart: Chart, rng: random.Random, max_degree: int = 2, variables: Sequence[int] | None = None, terms: int = 3
) -> RationalFunction:
    """Sparse polynomial in the chosen variables (all by default) of total degree <= max_degree."""
    vars_ = list(range(chart.nvars)) if variables is None else list(variables)
    out = chart.zero()
    for _ in range(rng.randint(1, terms)):
        mono = chart.const(random_coefficient(rng))
        for _ in range(rng.randint(0, max_degree)):
            if vars_:
                mono = mono * chart.var(rng.choice(vars_))
        out = out + mono
    return out


def random_form(
    chart: Chart,
    degree: int,
    rng: random.Random,
    kind: ValueKind = SCALAR,
    max_degree: int = 2,
    indices: Sequence[int] | None = None,
    variables: Sequence[int] | None = None,
) -> Form:
    """Form whose wedge monomials use only ``indices`` and coefficients only ``variables``."""
    idx_pool = list(range(chart.nvars)) if indices is None else list(indices)
    terms = {}
    for idx in itertools.combinations(idx_pool, degree):
        if rng.random() < 0.6:
            terms[idx] = [random_polynomial(chart, rng, max_degree, variables) for _ in range(kind.dim)]
    return Form(chart, degree, kind, terms)


def random_vector_field(chart: Chart, rng: random.Random, max_degree: int = 2) -> VectorField:
    return VectorField(chart, [random_polynomial(chart, rng, max_degree) for _ in range(chart.nvars)])


def random_decomposable(chart: Chart, degree: int, rng: random.Random, max_degree: int = 2) -> Form:
    """phi (x) X with phi a scalar form and X a vector field."""
    phi = Form(chart, degree, SCALAR, {idx: [random_polynomial(chart, rng, max_degree)] for idx in all_index_tuples(chart.nvars, degree) if rng.random() < 0.7})
    return tangent_tensor(phi, random_vector_field(chart, rng, max_degree))


def random_tangent_form(chart: Chart, degree: int, rng: random.Random, max_degree: int = 2) -> Form:
    total = None
    for _ in range(rng.randint(1, 2)):
        term = random_decomposable(chart, degree, rng, max_degree)
        total = term if total is None else total + term
    return total


def random_transz_basic(A: GAction, degree: int, rng: random.Random, kind: ValueKind | None = None, max_degree: int = 2) -> Form:
    """Basic forms for an abelian action generated by d/dz on (x, y, z): no dz, no z-dependence."""
    kind = kind or SCALAR
    return random_form(A.chart, degree, rng, kind, max_degree, indices=[0, 1], variables=[0, 1])


def random_heis3_basic(A: GAction, rng: random.Random) -> Form:
    """The basic g-valued forms of the Heisenberg action are the 0-forms a e1 + b e2 + (a y - b x + c) e3."""
    a, b, c = (random_coefficient(rng) for _ in range(3))
    x, y = A.chart.var(0), A.chart.var(1)
    vals = [A.chart.const(a), A.chart.const(b), y * a - x * b + c]
    return Form.function(A.chart, vals, algebra_kind(A.algebra))


def transz_perturbation(base: ConnectionForm, rng: random.Random, max_degree: int = 2) -> ConnectionForm:
    """omega + alpha with alpha a random basic g-valued 1-form."""
    A = base.action
    alpha = random_transz_basic(A, 1, rng, base.omega.kind, max_degree)
    return ConnectionForm(A, base.omega + alpha)
