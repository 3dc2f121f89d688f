"""Graded brackets of vector-valued forms.

The algebraic bracket of g-valued forms, the module action of a
representation, the value-space tensor wedge, the Froelicher-Nijenhuis bracket
of tangent-valued forms and the insertion operator.  Each product has a second,
independent implementation (permutation sums on vector fields) used as an
oracle in the tests.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

from .calculus import (
    SCALAR,
    Form,
    VectorField,
    contract,
    exterior_derivative,
    interior_product,
    lie_derivative,
    tangent_kind,
    vector_kind,
    wedge,
    wedge_general,
)
from .lie import LieAlgebra


def _algebra_of(*forms: Form) -> LieAlgebra:
    algebra = None
    for f in forms:
        if f.kind.kind != "vector" or f.kind.algebra is None:
            raise ValueError("expected a Lie-algebra-valued form")
        if algebra is None:
            algebra = f.kind.algebra
        elif f.kind.algebra != algebra:
            raise ValueError("Lie algebra mismatch between forms")
    return algebra


def _bracket_values(L: LieAlgebra):
    n = L.dim
    entries = [
        (i, j, [(k, c) for k, c in enumerate(L.structure[i][j]) if c])
        for i in range(n)
        for j in range(n)
    ]
    entries = [e for e in entries if e[2]]

    def combine(u, v):
        out = [u[0] * 0] * n
        for i, j, row in entries:
            if u[i].is_zero() or v[j].is_zero():
                continue
            uv = u[i] * v[j]
            for k, c in row:
                out[k] = out[k] + uv * c
        return out

    return combine


def alg_bracket(phi: Form, psi: Form) -> Form:
    """[phi, psi]^ = sum_{i,j} phi^i ^ psi^j (x) [X_i, X_j]."""
    L = _algebra_of(phi, psi)
    return wedge_general(phi, psi, _bracket_values(L), phi.kind)


def _shuffle_sum(p: int, q: int, evaluate_pair, zero, n_args_indices):
    """1/(p!q!) sum_sigma sign(sigma) B(phi(X_sigma...), psi(X_sigma...)) on an index tuple."""
    total = zero
    for perm in itertools.permutations(range(p + q)):
        sign = _parity(perm)
        left = tuple(n_args_indices[k] for k in perm[:p])
        right = tuple(n_args_indices[k] for k in perm[p:])
        term = evaluate_pair(left, right)
        total = [t + sign * x for t, x in zip(total, term)] if sign > 0 else [t - x for t, x in zip(total, term)]
    scale = Fraction(1, math.factorial(p) * math.factorial(q))
    return [t * scale for t in total]


def _parity(perm: Sequence[int]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def alg_bracket_shuffle(phi: Form, psi: Form) -> Form:
    """Oracle: the defining signed permutation sum, evaluated on coordinate fields."""
    L = _algebra_of(phi, psi)
    combine = _bracket_values(L)
    chart = phi.chart
    p, q = phi.degree, psi.degree
    degree = p + q
    zero = [chart.zero()] * L.dim
    terms = {}
    if degree <= chart.nvars:
        for idx in itertools.combinations(range(chart.nvars), degree):
            terms[idx] = _shuffle_sum(p, q, lambda a, b: combine(phi.value(a), psi.value(b)), zero, idx)
    return Form(chart, degree, phi.kind, terms)


def rho_wedge(phi: Form, Psi: Form, rho: Sequence[Sequence[Sequence]]) -> Form:
    """rho^(phi) Psi = sum_i phi^i ^ rho(X_i) Psi for representation matrices rho."""
    if phi.kind.kind != "vector":
        raise ValueError("phi must be vector valued")
    if len(rho) != phi.kind.dim:
        raise ValueError("need one representation matrix per component of phi")
    m = Psi.kind.dim
    for mat in rho:
        if len(mat) != m or any(len(r) != m for r in mat):
            raise ValueError(f"representation matrices must be {m}x{m}")
    mats = [[[Fraction(v) for v in row] for row in mat] for mat in rho]

    def combine(u, v):
        out = [u[0] * 0] * m
        for i, ui in enumerate(u):
            if ui.is_zero():
                continue
            mat = mats[i]
            for a in range(m):
                acc = None
                for b in range(m):
                    if mat[a][b] and not v[b].is_zero():
                        t = v[b] * mat[a][b]
                        acc = t if acc is None else acc + t
                if acc is not None:
                    out[a] = out[a] + ui * acc
        return out

    return wedge_general(phi, Psi, combine, Psi.kind)


def ad_representation(L: LieAlgebra) -> list:
    from .lie import ad_matrix

    return [ad_matrix(L, L.basis_vector(i)) for i in range(L.dim)]


def tensor_wedge(Phi: Form, Psi: Form) -> Form:
    """Value-space tensor product with wedge on the form part; value index a*dim(b) + b."""
    a, b = Phi.kind.dim, Psi.kind.dim

    def combine(u, v):
        return [x * y for x in u for y in v]

    kind = SCALAR if a * b == 1 and Phi.kind.kind == Psi.kind.kind == "scalar" else vector_kind(a * b)
    return wedge_general(Phi, Psi, combine, kind)


# Froelicher-Nijenhuis bracket ----------------------------------------------------


def _require_tangent(*forms: Form):
    for f in forms:
        if f.kind.kind != "tangent":
            raise ValueError("expected a tangent-valued form")


def tangent_tensor(phi: Form, X: VectorField) -> Form:
    """phi (x) X for a scalar form phi."""
    return Form.tensor(phi, X.components, tangent_kind(phi.chart))


def decompose(K: Form) -> list[tuple[Form, VectorField]]:
    """K = sum_I dx^I (x) K_I with K_I the vector field of stored components."""
    chart = K.chart
    out = []
    for idx, vals in sorted(K.terms.items()):
        out.append((Form(chart, K.degree, SCALAR, {idx: [chart.one()]}), VectorField(chart, vals)))
    return out


def fn_bracket_decomposable(phi: Form, X: VectorField, psi: Form, Y: VectorField) -> Form:
    """[phi (x) X, psi (x) Y] via Lie derivatives, insertions and d."""
    chart = phi.chart
    k, l = phi.degree, psi.degree
    degree = k + l
    if degree > chart.nvars:
        return Form.zero(chart, degree, tangent_kind(chart))
    out = tangent_tensor(wedge(phi, psi), X.bracket(Y))
    out = out + tangent_tensor(wedge(phi, lie_derivative(X, psi)), Y)
    out = out - tangent_tensor(wedge(lie_derivative(Y, phi), psi), X)
    extra = Form.zero(chart, degree, tangent_kind(chart))
    if l > 0:
        extra = extra + tangent_tensor(wedge(exterior_derivative(phi), interior_product(X, psi)), Y)
    if k > 0:
        extra = extra + tangent_tensor(wedge(interior_product(Y, phi), exterior_derivative(psi)), X)
    return out + (extra if k % 2 == 0 else -extra)


def fn_bracket(K: Form, L: Form) -> Form:
    """Froelicher-Nijenhuis bracket, summed over the decomposable terms of K and L."""
    _require_tangent(K, L)
    chart = K.chart
    degree = K.degree + L.degree
    out = Form.zero(chart, degree, tangent_kind(chart))
    if degree > chart.nvars:
        return out
    for phi, X in decompose(K):
        for psi, Y in decompose(L):
            out = out + fn_bracket_decomposable(phi, X, psi, Y)
    return out


def _eval_tangent(K: Form, fields: Sequence[VectorField]) -> VectorField:
    return VectorField(K.chart, contract(K, fields))


def fn_bracket_global(K: Form, L: Form, fields: Sequence[VectorField]) -> VectorField:
    """Oracle: the five-term global formula applied to arbitrary vector fields."""
    _require_tangent(K, L)
    k, l = K.degree, L.degree
    m = k + l
    if len(fields) != m:
        raise ValueError(f"need {m} vector fields")
    chart = K.chart
    total = VectorField.zero(chart)
    fact = math.factorial

    def add(acc, coeff, vf):
        if coeff == 0 or vf.is_zero():
            return acc
        return acc + vf.scale(chart.const(coeff))

    for perm in itertools.permutations(range(m)):
        s = _parity(perm)
        xs = [fields[i] for i in perm]
        # term 1
        c1 = Fraction(s, fact(k) * fact(l))
        total = add(total, c1, _eval_tangent(K, xs[:k]).bracket(_eval_tangent(L, xs[k:])))
        # term 2
        if l >= 1:
            c2 = Fraction(-s, fact(k) * fact(l - 1))
            arg = _eval_tangent(K, xs[:k]).bracket(xs[k])
            total = add(total, c2, _eval_tangent(L, [arg] + xs[k + 1 :]))
        # term 3
        if k >= 1:
            c3 = Fraction(s * (-1) ** (k * l), fact(k - 1) * fact(l))
            arg = _eval_tangent(L, xs[:l]).bracket(xs[l])
            total = add(total, c3, _eval_tangent(K, [arg] + xs[l + 1 :]))
        if k >= 1 and l >= 1:
            br = xs[0].bracket(xs[1])
            denom = fact(k - 1) * fact(l - 1) * 2
            # term 4
            c4 = Fraction(s * (-1) ** (k - 1), denom)
            inner = _eval_tangent(K, [br] + xs[2 : k + 1])
            total = add(total, c4, _eval_tangent(L, [inner] + xs[k + 1 :]))
            # term 5
            c5 = Fraction(s * (-1) ** ((k - 1) * l), denom)
            inner = _eval_tangent(L, [br] + xs[2 : l + 1])
            total = add(total, c5, _eval_tangent(K, [inner] + xs[l + 1 :]))
    return total


def fn_bracket_via_global(K: Form, L: Form) -> Form:
    """Form whose coefficients are the global formula on coordinate fields."""
    chart = K.chart
    degree = K.degree + L.degree
    terms = {}
    if degree <= chart.nvars:
        coords = [VectorField.coordinate(chart, i) for i in range(chart.nvars)]
        for idx in itertools.combinations(range(chart.nvars), degree):
            terms[idx] = fn_bracket_global(K, L, [coords[i] for i in idx]).components
    return Form(chart, degree, tangent_kind(chart), terms)


# insertion operator ---------------------------------------------------------------


def insertion(K: Form, psi: Form) -> Form:
    """i_K psi for tangent-valued K and any form psi: sum_J sum_a K_J^a dx^J ^ i_{d_a} psi."""
    _require_tangent(K)
    chart = K.chart
    degree = K.degree + psi.degree - 1
    if psi.degree == 0:
        return Form.zero(chart, max(degree, 0), psi.kind)
    out = Form.zero(chart, degree, psi.kind)
    if degree > chart.nvars:
        return out
    coords = [VectorField.coordinate(chart, a) for a in range(chart.nvars)]
    inner = [interior_product(coords[a], psi) for a in range(chart.nvars)]
    for idx, vals in K.terms.items():
        for a, f in enumerate(vals):
            if f.is_zero() or inner[a].is_zero():
                continue
            dxJ = Form(chart, K.degree, SCALAR, {idx: [f]})
            out = out + wedge(dxJ, inner[a])
    return out


def insertion_permutation(K: Form, psi: Form, fields: Sequence[VectorField]) -> tuple:
    """Oracle: 1/(k!(l-1)!) sum_sigma sign psi(K(X_sigma1..), X_sigma(k+1), ...)."""
    k, l = K.degree, psi.degree
    m = k + l - 1
    if len(fields) != m:
        raise ValueError(f"need {m} vector fields")
    chart = K.chart
    total = [chart.zero()] * psi.kind.dim
    for perm in itertools.permutations(range(m)):
        s = _parity(perm)
        xs = [fields[i] for i in perm]
        val = contract(psi, [_eval_tangent(K, xs[:k])] + xs[k:])
        total = [t + v if s > 0 else t - v for t, v in zip(total, val)]
    scale = chart.const(Fraction(1, math.factorial(k) * math.factorial(l - 1)))
    return tuple(t * scale for t in total)


def compose_tangent(K: Form, L: Form) -> Form:
    """Pointwise composition K o L of two tangent-valued 1-forms (matrix product)."""
    _require_tangent(K, L)
    if K.degree != 1 or L.degree != 1:
        raise ValueError("composition needs 1-forms")
    from . import linalg

    return Form.from_matrix(K.chart, linalg.matmul(K.matrix(), L.matrix()))
