import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gmanifolds import fixtures
from gmanifolds.action import GAction, check_homomorphism, zeta_of_form
from gmanifolds.calculus import Chart, Form, VectorField, algebra_kind, form_from_literal
from gmanifolds.connection import ConnectionForm, curvature_form, verify_connection_form
from gmanifolds.homogeneous import (
    NoReductiveComplement,
    ReductiveDecomposition,
    SingularActionError,
    connection_form_for,
    connection_form_from_reductive,
    find_reductive_complement,
    inverse_action,
    lift_connection,
    maurer_cartan_from_action,
    mc_residual,
)
from gmanifolds.lie import LieAlgebra, Subalgebra, apply_matrix, exp_ad

H = fixtures.heis3()
HK = algebra_kind(H.algebra)

KAPPA = {"e1": {"dx": 1}, "e2": {"dy": 1}, "e3": {"dz": 1, "dy": "-x"}}
TAMPERED = [
    {"e1": {"dx": 1}, "e2": {"dy": 1}, "e3": {"dz": 1}},
    {"e1": {"dx": 1}, "e2": {"dy": 1}, "e3": {"dz": 1, "dx": "y", "dy": "x"}},
    {"e1": {"dx": "1+y^2"}, "e2": {"dy": 1}, "e3": {"dz": 1, "dy": "-x"}},
]


def heis(literal):
    return form_from_literal(H.chart, literal, HK)


def abelian(n):
    return LieAlgebra([f"e{i + 1}" for i in range(n)], [[[0] * n for _ in range(n)] for _ in range(n)])


def test_maurer_cartan_examples():
    kappa = maurer_cartan_from_action(H)
    assert kappa == heis(KAPPA)
    assert mc_residual(kappa).is_zero()
    chart = Chart(["x", "y"])
    L = abelian(2)
    A = GAction(L, chart, [VectorField.coordinate(chart, 0), VectorField.coordinate(chart, 1)])
    kappa = maurer_cartan_from_action(A)
    assert kappa == form_from_literal(chart, {"e1": {"dx": 1}, "e2": {"dy": 1}}, algebra_kind(L))
    assert mc_residual(kappa).is_zero()
    with pytest.raises(SingularActionError):
        maurer_cartan_from_action(fixtures.sl2r())


def test_singular_square_action_rejected():
    chart = Chart(["x", "y"])
    A = GAction(abelian(2), chart, [VectorField.coordinate(chart, 0), VectorField.coordinate(chart, 0)])
    with pytest.raises(SingularActionError):
        maurer_cartan_from_action(A)


def test_mc_residual_of_tampered_kappa():
    assert mc_residual(heis(TAMPERED[0])) == heis({"e3": {"dx^dy": 1}})


@pytest.mark.parametrize("literal", TAMPERED)
def test_maurer_cartan_equivalence_on_tampered_kappa(literal):
    kappa = heis(literal)
    assert not mc_residual(kappa).is_zero()
    assert not check_homomorphism(inverse_action(kappa))


def test_inverse_round_trip():
    kappa = maurer_cartan_from_action(H)
    back = inverse_action(kappa)
    assert back.fundamentals == H.fundamentals
    assert check_homomorphism(back)
    assert maurer_cartan_from_action(back) == kappa
    assert zeta_of_form(H, kappa) == Form.identity(H.chart)


def test_reductive_examples():
    aff = fixtures.aff1_algebra()
    D = find_reductive_complement(aff, Subalgebra(aff, [[0, 1]]))
    assert D is not None and D.verify()
    assert Subalgebra(aff, D.m, check=False) == Subalgebra(aff, [[1, 0]], check=False)
    sl2 = fixtures.sl2_algebra()
    assert find_reductive_complement(sl2, Subalgebra(sl2, [[0, 1, 0], [0, 0, 1]])) is None
    L = abelian(3)
    D = find_reductive_complement(L, Subalgebra(L, [[1, 1, 0]]))
    assert D is not None and D.verify() and len(D.m) == 2


def test_reductive_decomposition_rejects_bad_complement():
    aff = fixtures.aff1_algebra()
    D = ReductiveDecomposition(Subalgebra(aff, [[0, 1]]), [[1, 1]])
    cert = D.verify()
    assert not cert and cert.failures == ["[h0, m0] in m"]


def test_connection_form_from_reductive_examples():
    A = fixtures.aff1()
    wc = connection_form_for(A, [0])
    assert wc.omega == form_from_literal(A.chart, {"e1": {"dx": 1}}, algebra_kind(A.algebra))
    assert verify_connection_form(wc)
    wc = connection_form_for(H, [0, 0, 0])
    assert wc.omega == heis(KAPPA)
    with pytest.raises(NoReductiveComplement):
        connection_form_for(fixtures.sl2r(), [0])


def test_connection_form_image_is_complement_at_base_point():
    A = fixtures.heis_coset()
    iso = Subalgebra(A.algebra, [[0, 0, 1]])
    D = find_reductive_complement(A.algebra, iso, (Fraction(0), Fraction(0)))
    wc = connection_form_from_reductive(A, D)
    assert verify_connection_form(wc)
    at0 = [[v.evaluate([0, 0]) for v in row] for row in wc.omega.matrix()]
    m = Subalgebra(A.algebra, D.m, check=False)
    for j in range(2):
        assert m.contains([row[j] for row in at0])


def test_heisenberg_group_chart():
    G = fixtures.heisenberg_group()
    assert G.verify()
    # left-translation fields realize the HEIS3 action on the group chart
    assert check_homomorphism(G.left_action())
    assert G.left_maurer_cartan() == form_from_literal(G.chart, {"e1": {"da": 1}, "e2": {"db": 1}, "e3": {"dc": 1, "db": "-a"}}, algebra_kind(G.algebra))


def test_lift_connection_on_heisenberg_cosets():
    G = fixtures.heisenberg_group()
    wc = ConnectionForm(fixtures.heis_coset(), form_from_literal(
        fixtures.heis_coset().chart, {"e1": {"da": 1}, "e2": {"db": 1}, "e3": {"da": "b", "db": "-a"}}, algebra_kind(G.algebra)
    ))
    assert verify_connection_form(wc)
    assert curvature_form(wc) == form_from_literal(wc.action.chart, {"e3": {"da^db": -1}}, algebra_kind(G.algebra))
    h = Subalgebra(G.algebra, [[0, 0, 1]])
    report = lift_connection(G, h, wc, ["a", "b"], [([0, 0, 1], 1), ([0, 0, 2], Fraction(-1, 2))])
    assert report.certificate
    assert "d omega~ - 1/2 [omega~, omega~] + Ad p^* Omega" in report.certificate.items
    for idx, vals in report.omega_tilde.terms.items():
        assert vals[0].is_zero() and vals[1].is_zero()
    with pytest.raises(ValueError):
        lift_connection(G, h, wc, ["a", "b"], [([1, 0, 0], 1)])


def test_lift_with_trivial_subgroup_vanishes():
    G = fixtures.heisenberg_group()
    A = G.left_action()
    wc = ConnectionForm(A, maurer_cartan_from_action(A))
    report = lift_connection(G, Subalgebra(G.algebra, []), wc, ["a", "b", "c"])
    assert report.certificate and report.omega_tilde.is_zero()


@given(st.fractions(-3, 3, max_denominator=4))
def test_complement_invariant_under_exp_ad(t):
    # ad(e3) is nilpotent on heis3, so the exact series applies
    coset = fixtures.heis_coset().algebra
    Dc = find_reductive_complement(coset, Subalgebra(coset, [[0, 0, 1]]))
    mc = Subalgebra(coset, Dc.m, check=False)
    E = exp_ad(coset, [0, 0, 1], t)
    assert E.exact
    for v in Dc.m:
        assert mc.contains(apply_matrix(E.matrix, v))
    # on aff(1) ad(e2) is semisimple: e^{t ad e2} scales e1 by e^{-t}
    aff = fixtures.aff1_algebra()
    D = find_reductive_complement(aff, Subalgebra(aff, [[0, 1]]))
    E = exp_ad(aff, [0, 1], float(t))
    assert not E.exact
    image = apply_matrix(E.matrix, D.m[0])
    assert abs(image[1]) < 1e-12 and abs(image[0] - math.exp(-float(t)) * float(D.m[0][0])) < 1e-9
