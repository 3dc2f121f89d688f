import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmanifolds import fixtures
from gmanifolds.action import is_basic, zeta_of_form
from gmanifolds.brackets import fn_bracket, tangent_tensor
from gmanifolds.calculus import SCALAR, Form, VectorField, algebra_kind, d, form_from_literal
from gmanifolds.connection import (
    Connection,
    ConnectionForm,
    LocalBundle,
    bianchi,
    check_horizontal_lift,
    check_basic_identities,
    check_covariant_identities,
    christoffel_connection,
    christoffel_curvature,
    connection_from_form,
    cov_deriv_omega,
    cov_deriv_phi,
    curvature,
    curvature_form,
    curvature_projection,
    horizontal_lift,
    is_asystatic,
    verify_connection,
    verify_connection_form,
)
from gmanifolds.randomforms import random_polynomial, random_transz_basic, transz_perturbation

T = fixtures.transz()
H = fixtures.heis3()
DZ = VectorField.coordinate(T.chart, 2)


def scalar(A, literal):
    return form_from_literal(A.chart, literal)


def gform(A, literal):
    return form_from_literal(A.chart, literal, algebra_kind(A.algebra))


def transz_connection(literal):
    return Connection(T, tangent_tensor(scalar(T, literal), DZ))


ALL_FORMS = {
    "transz": fixtures.transz_omega,
    "heis3": fixtures.heis3_omega,
    "rot2": fixtures.rot2_omega,
    "aff1": fixtures.aff1_omega,
}


def test_connection_from_form_examples():
    C = connection_from_form(fixtures.transz_omega())
    assert C.phi == tangent_tensor(scalar(T, {"dz": 1, "dx": "-y"}), DZ)
    assert connection_from_form(fixtures.heis3_omega()).phi == Form.identity(H.chart)
    R = fixtures.rot2()
    angular = scalar(R, {"dx": "-y/(x^2+y^2)", "dy": "x/(x^2+y^2)"})
    assert connection_from_form(fixtures.rot2_omega()).phi == tangent_tensor(angular, R.fundamentals[0])


@pytest.mark.parametrize("name", sorted(ALL_FORMS))
def test_fixture_connections_are_valid(name):
    wc = ALL_FORMS[name]()
    assert verify_connection_form(wc)
    assert verify_connection(connection_from_form(wc))


def test_connection_failures():
    bad = Connection(T, tangent_tensor(Form.dx(T.chart, 2), DZ) + tangent_tensor(Form.dx(T.chart, 0), VectorField.coordinate(T.chart, 0)))
    cert = verify_connection(bad)
    assert not cert
    assert all(label.startswith("image") for label in cert.failures)
    cert = verify_connection_form(ConnectionForm(T, gform(T, {"e1": {"dz": "z"}})))
    assert "(2) zeta omega zeta - zeta" in cert.failures
    with pytest.raises(ValueError):
        connection_from_form(ConnectionForm(T, gform(T, {"e1": {"dz": "z"}})))


def test_curvature_examples():
    C = connection_from_form(fixtures.transz_omega())
    expected = tangent_tensor(scalar(T, {"dx^dy": -1}), DZ)
    assert curvature(C) == expected == curvature_projection(C)
    assert curvature(transz_connection({"dz": 1})).is_zero()
    assert curvature(connection_from_form(fixtures.heis3_omega())).is_zero()


def test_curvature_form_examples():
    wc = fixtures.transz_omega()
    Omega = curvature_form(wc)
    assert Omega == gform(T, {"e1": {"dx^dy": 1}})
    assert curvature(connection_from_form(wc)) == -zeta_of_form(T, Omega)
    assert curvature_form(fixtures.heis3_omega()).is_zero()
    assert curvature_form(fixtures.rot2_omega()).is_zero()


@pytest.mark.parametrize("name", sorted(ALL_FORMS))
def test_bianchi_on_fixtures(name):
    cert = bianchi(wc=ALL_FORMS[name]())
    assert cert and len(cert.items) == 2


def test_cov_deriv_phi_examples():
    C = connection_from_form(fixtures.transz_omega())
    assert cov_deriv_phi(C, Form.function(T.chart, T.chart.var(2))) == scalar(T, {"dx": "y"})
    assert cov_deriv_phi(C, Form(T.chart, 0, SCALAR, {(): [T.chart.var(2)]})).degree == 1
    flat = transz_connection({"dz": 1})
    psi = scalar(T, {"dx": "x*y^2"})
    assert cov_deriv_phi(flat, psi) == d(psi)
    # free action: d_Phi agrees with d_omega on basic forms
    basic = gform(T, {"e1": {"dx": "y^2"}})
    assert cov_deriv_phi(C, basic) == cov_deriv_omega(fixtures.transz_omega(), basic)


def test_cov_deriv_omega_examples():
    wc = fixtures.transz_omega()
    psi = gform(T, {"e1": {"dy": "x*z"}})
    assert cov_deriv_omega(wc, psi) == d(psi)
    Psi = scalar(T, {"dy": "z"})
    assert cov_deriv_omega(wc, Psi, [[[0]]]) == d(Psi)
    hk = fixtures.heis3_omega()
    assert cov_deriv_omega(hk, gform(H, {"e1": {"dx": 1}})) == gform(H, {"e3": {"dx^dy": 1}})
    with pytest.raises(ValueError):
        cov_deriv_omega(hk, gform(H, {"e1": {"dx": 1}}), [[[0]]])


def test_basic_identities_examples():
    C = connection_from_form(fixtures.transz_omega())
    psi = gform(T, {"e1": {"dy": "x"}})
    assert check_basic_identities(C, fixtures.transz_omega(), psi=psi, Psi=psi)
    # AFF1 is transitive but not free: only the contraction formula of item (4) applies
    A = fixtures.aff1()
    wc = fixtures.aff1_omega()
    Psi = gform(A, {"e2": {"1": 1}, "e1": {"1": "-x"}})
    cert = check_basic_identities(connection_from_form(wc), wc, Psi=Psi)
    assert cert and not any("free" in k for k in cert.items) and cert.notes
    basic = gform(H, {"e1": {"1": 2}, "e2": {"1": -1}, "e3": {"1": "2*y + x"}})
    cert = check_basic_identities(connection_from_form(fixtures.heis3_omega()), psi=basic)
    assert cert and cert.items["(3) zeta_(d_Phi psi) + [Phi, zeta_psi]"].is_zero()


def test_basic_identities_precondition_failure():
    C = connection_from_form(fixtures.transz_omega())
    cert = check_basic_identities(C, psi=gform(T, {"e1": {"dz": 1}}))
    assert not cert and "psi basic" in cert.failures


def test_covariant_identities_examples():
    wc = fixtures.transz_omega()
    C = connection_from_form(wc)
    z = Form.function(T.chart, T.chart.var(2))
    cert = check_covariant_identities(C, wc, [z, scalar(T, {"dz": "x"})])
    assert cert
    # both sides of item (2) on psi = z equal -dx^dy
    assert cov_deriv_phi(C, cov_deriv_phi(C, z)) == scalar(T, {"dx^dy": -1})
    flat = transz_connection({"dz": 1})
    assert check_covariant_identities(flat, None, [z])
    assert cov_deriv_phi(flat, cov_deriv_phi(flat, z)).is_zero()
    cert = check_covariant_identities(connection_from_form(fixtures.heis3_omega()), fixtures.heis3_omega())
    assert cert and cert.items["(3) free: Omega - d_Phi omega"].is_zero()


def test_christoffel_connection_examples():
    B = fixtures.bund1()
    C = christoffel_connection(B)
    ds = VectorField.coordinate(B.chart, 2)
    assert C.phi == tangent_tensor(form_from_literal(B.chart, {"ds": 1, "dx": "y"}), ds)
    assert verify_connection(C)
    assert curvature(C) == christoffel_curvature(B) == tangent_tensor(form_from_literal(B.chart, {"dx^dy": 1}), ds)
    flat = fixtures.bundle(["x", "y"], {})
    assert christoffel_connection(flat).phi == tangent_tensor(form_from_literal(flat.chart, {"ds": 1}), VectorField.coordinate(flat.chart, 2))
    assert curvature(christoffel_connection(flat)).is_zero()


def test_christoffel_centralizer_violation():
    B = fixtures.bundle(["x", "y"], {"x": "s"})
    with pytest.raises(ValueError, match="centralizer"):
        christoffel_connection(B)
    with pytest.raises(ValueError):
        LocalBundle(B.base_chart, fixtures.line_fiber("x"), {})


def test_horizontal_lift():
    B = fixtures.bund1()
    C = christoffel_connection(B)
    xi = VectorField(B.base_chart, [B.base_chart.one(), B.base_chart.var(0)])
    lift = horizontal_lift(C, B, xi)
    assert lift.components[2] == B.chart.parse("-y")
    assert check_horizontal_lift(C, B, xi)


def test_asystatic_examples():
    assert is_asystatic(fixtures.sl2r(), [0])
    assert not is_asystatic(H, [1, 2, 3])
    assert is_asystatic(fixtures.aff1(), [0])


def _random_perturbation(seed):
    return transz_perturbation(fixtures.transz_omega(), random.Random(seed))


@settings(max_examples=50)
@given(st.integers(0, 10**6))
def test_random_transz_perturbations(seed):
    wc = _random_perturbation(seed)
    assert verify_connection_form(wc)
    C = connection_from_form(wc)
    Omega = curvature_form(wc)
    assert curvature(C) == -zeta_of_form(T, Omega) == curvature_projection(C)
    assert bianchi(wc=wc)
    assert check_covariant_identities(C, wc, [Form.function(T.chart, T.chart.var(2))])


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_covariant_identities_item2_on_random_scalars(seed):
    rng = random.Random(seed)
    C = connection_from_form(fixtures.transz_omega())
    psi = Form.function(T.chart, random_polynomial(T.chart, rng, 2))
    assert check_covariant_identities(C, None, [psi])


@settings(max_examples=20)
@given(st.integers(0, 10**6), st.integers(0, 1))
def test_d_phi_preserves_basic_forms(seed, degree):
    rng = random.Random(seed)
    C = connection_from_form(_random_perturbation(seed))
    psi = random_transz_basic(T, degree, rng, algebra_kind(T.algebra))
    assert is_basic(T, psi)
    assert is_basic(T, cov_deriv_phi(C, psi))


def test_fn_equivariance_of_bund1_vertical_projection():
    C = christoffel_connection(fixtures.bund1())
    for f in C.action.fundamentals:
        assert fn_bracket(Form.from_vector_field(f), C.phi).is_zero()
