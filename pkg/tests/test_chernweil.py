import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmanifolds import fixtures
from gmanifolds.calculus import Form, algebra_kind, d, form_from_literal, pullback
from gmanifolds.chernweil import (
    NonInvariantPolynomial,
    apply_invariant,
    basic_complex_check,
    chern_weil_certificate,
    chern_weil_form,
    transgression,
)
from gmanifolds.connection import ConnectionForm, curvature_form
from gmanifolds.lie import InvariantPolynomial, check_invariance, killing_form, trace_polynomial
from gmanifolds.randomforms import random_form, random_polynomial, transz_perturbation

T = fixtures.transz()
H = fixtures.heis3()
E1 = InvariantPolynomial.linear([1])
E1_SQUARED = InvariantPolynomial(2, 1, {(0, 0): 1})


def scalar(A, literal):
    return form_from_literal(A.chart, literal)


def gform(A, literal):
    return form_from_literal(A.chart, literal, algebra_kind(A.algebra))


def transz_flat():
    return ConnectionForm(T, gform(T, {"e1": {"dz": 1}}))


def test_apply_invariant_examples():
    Omega = gform(T, {"e1": {"dx^dy": 1}})
    assert apply_invariant(E1, Omega) == scalar(T, {"dx^dy": 1})
    assert apply_invariant(InvariantPolynomial(1, 1, {}), Omega).is_zero()
    f = InvariantPolynomial(2, 3, {(0, 1): 1})
    assert apply_invariant(f, gform(H, {"e1": {"dx": 1}}), gform(H, {"e2": {"dy": 1}})) == scalar(H, {"dx^dy": 1})


def test_apply_invariant_rejects_mismatches():
    with pytest.raises(ValueError):
        apply_invariant(E1_SQUARED, gform(T, {"e1": {"dx": 1}}))
    with pytest.raises(ValueError):
        apply_invariant(E1, gform(H, {"e1": {"dx": 1}}))


def test_chern_weil_examples():
    wc = fixtures.transz_omega()
    cw = chern_weil_form(E1, wc)
    assert cw == scalar(T, {"dx^dy": 1})
    cert = chern_weil_certificate(E1, wc)
    assert cert and any(k.startswith("horizontal") for k in cert.items)
    assert chern_weil_form(E1, transz_flat()).is_zero()
    assert chern_weil_form(InvariantPolynomial.linear([1, 0, 0]), fixtures.heis3_omega()).is_zero()


def test_non_invariant_polynomial_rejected():
    with pytest.raises(NonInvariantPolynomial) as info:
        chern_weil_form(InvariantPolynomial.linear([0, 0, 1]), fixtures.heis3_omega())
    assert not info.value.certificate


def test_invariance_verdicts():
    sl2 = fixtures.sl2_algebra()
    assert check_invariance(killing_form(sl2), sl2)
    for k in (2, 3):
        assert check_invariance(trace_polynomial(sl2, k), sl2)
    assert not check_invariance(InvariantPolynomial.linear([0, 0, 1]), H.algebra)
    assert check_invariance(InvariantPolynomial(2, 3, {(0, 1): 1}), H.algebra)


def test_coset_chern_weil_form():
    A = fixtures.heis_coset()
    wc = ConnectionForm(A, gform(A, {"e1": {"da": 1}, "e2": {"db": 1}, "e3": {"da": "b", "db": "-a"}}))
    f = InvariantPolynomial.linear([1, 0, 0])
    cw = chern_weil_form(f, wc)
    assert cw.is_zero() and d(cw).is_zero()


def test_transgression_example():
    rep = transgression(E1, transz_flat(), fixtures.transz_omega())
    assert rep.passed and rep.certificate()
    assert rep.difference == scalar(T, {"dx^dy": 1})
    assert rep.primitive == scalar(T, {"dx": "-y"})
    same = transgression(E1, fixtures.transz_omega(), fixtures.transz_omega())
    assert same.difference.is_zero() and same.primitive.is_zero() and same.passed
    sq = transgression(E1_SQUARED, transz_flat(), fixtures.transz_omega())
    assert sq.difference.is_zero() and sq.primitive.is_zero() and sq.difference.degree == 4


def test_transgression_on_rot2():
    # x dx + y dy is basic for the rotation action, and both connections are flat
    A = fixtures.rot2()
    wc0 = fixtures.rot2_omega()
    wc1 = ConnectionForm(A, wc0.omega + gform(A, {"e1": {"dx": "x", "dy": "y"}}))
    rep = transgression(E1, wc0, wc1)
    assert rep.passed and rep.difference.is_zero()
    assert rep.primitive == scalar(A, {"dx": "x", "dy": "y"})


def test_transgression_requires_horizontal_difference():
    bad = ConnectionForm(T, gform(T, {"e1": {"dz": 1, "dx": "z"}}))
    with pytest.raises(ValueError):
        transgression(E1, transz_flat(), bad)


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_transgression_on_random_perturbations(seed):
    rng = random.Random(seed)
    wc0 = transz_perturbation(fixtures.transz_omega(), rng)
    wc1 = transz_perturbation(wc0, rng)
    for f in (E1, E1_SQUARED):
        rep = transgression(f, wc0, wc1)
        assert rep.passed


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_chern_weil_forms_are_closed_and_basic(seed):
    wc = transz_perturbation(fixtures.transz_omega(), random.Random(seed))
    cert = chern_weil_certificate(E1, wc)
    assert cert
    assert d(chern_weil_form(E1, wc)).is_zero()


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_naturality_under_pullback(seed):
    rng = random.Random(seed)
    wc = transz_perturbation(fixtures.transz_omega(), rng)
    Omega = curvature_form(wc)
    chart = T.chart
    mapping = [random_polynomial(chart, rng, 2) for _ in range(3)]
    lhs = pullback(mapping, apply_invariant(E1, Omega), chart)
    assert lhs == apply_invariant(E1, pullback(mapping, Omega, chart))
    beta = random_form(chart, 1, rng, algebra_kind(T.algebra))
    lhs = pullback(mapping, apply_invariant(E1_SQUARED, Omega, beta), chart)
    assert lhs == apply_invariant(E1_SQUARED, pullback(mapping, Omega, chart), pullback(mapping, beta, chart))


def test_basic_complex_examples():
    cert = basic_complex_check(T, scalar(T, {"dy": "x"}))
    assert cert
    assert d(scalar(T, {"dy": "x"})) == scalar(T, {"dx^dy": 1})
    assert basic_complex_check(T, Form.function(T.chart, 1))
    cert = basic_complex_check(T, scalar(T, {"dx": "z"}))
    assert not cert and cert.failures[0] == "psi basic (precondition)"
    assert not cert.preconditions[0]
