import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmanifolds import fixtures
from gmanifolds.action import (
    GAction,
    analyze_point,
    check_homomorphism,
    check_zeta_identities,
    classify,
    is_basic,
    is_equivariant,
    is_horizontal,
    symbolic_kernel,
    verify_dual_action,
    zeta_of_form,
)
from gmanifolds.brackets import tangent_tensor
from gmanifolds.calculus import SCALAR, Chart, Form, VectorField, algebra_kind, form_from_literal
from gmanifolds.randomforms import random_heis3_basic, random_transz_basic

from strategies import vectors

H = fixtures.heis3()
T = fixtures.transz()


def fields(chart, rows):
    return [VectorField(chart, [chart.parse(str(c)) for c in row]) for row in rows]


def gform(A, literal):
    return form_from_literal(A.chart, literal, algebra_kind(A.algebra))


def test_homomorphism_examples():
    assert check_homomorphism(H)
    assert check_homomorphism(fixtures.sl2r())
    tampered = GAction(H.algebra, H.chart, fields(H.chart, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    cert = check_homomorphism(tampered)
    assert not cert
    # pairs are labelled by 0-based basis indices: (e1, e2)
    assert cert.failures == ["(0,1)"]
    assert cert.items["(0,1)"] == -VectorField.coordinate(H.chart, 2)


def test_analyze_point_examples():
    S = fixtures.sl2r()
    data = analyze_point(S, [0])
    assert data.rank == 1 and data.zeta_matrix == [[1, 0, 0]]
    assert data.isotropy.dim == 2
    assert data.isotropy.contains([0, 1, 0]) and data.isotropy.contains([0, 0, 1])
    assert not data.isotropy.contains([1, 0, 0])
    for p in ([0, 0, 0], [Fraction(1, 3), -2, 7]):
        data = analyze_point(H, p)
        assert data.rank == 3 and data.isotropy.dim == 0
    data = analyze_point(fixtures.rot2(), [1, 0])
    assert data.rank == 1 and data.isotropy.dim == 0


def test_analyze_point_rejects_excluded_locus():
    with pytest.raises(ValueError):
        analyze_point(fixtures.rot2(), [0, 0])


def test_sl2r_isotropy_at_other_points():
    # at x the kernel is spanned by h + 2x e and f + x^2 e
    S = fixtures.sl2r()
    iso = analyze_point(S, [3]).isotropy
    assert iso.contains([6, 1, 0]) and iso.contains([9, 0, 1]) and iso.dim == 2


def test_classify_examples():
    rng = random.Random(7)
    sample = [[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(3)] for _ in range(5)]
    flags = classify(H, sample)
    assert all(flags.values())
    flags = classify(fixtures.sl2r(), [[-1], [0], [1]])
    assert flags["effective"] and not flags["free_on_sample"]
    assert flags["transitive_on_sample"] and flags["constant_rank_on_sample"]
    line = Chart(["x"])
    zero = GAction(fixtures.line_algebra(), line, [VectorField.zero(line)])
    assert not classify(zero, [[0]])["effective"]
    assert symbolic_kernel(zero) == [[1]]
    with pytest.raises(ValueError):
        classify(H, [])


def test_classify_rot2_is_free_not_transitive():
    flags = classify(fixtures.rot2(), [[1, 0], [0, 2], [-1, 3]])
    assert flags["free_on_sample"] and not flags["transitive_on_sample"]


def test_zeta_of_form_examples():
    out = zeta_of_form(H, gform(H, {"e3": {"dx": 1}}))
    assert out == tangent_tensor(Form.dx(H.chart, 0), VectorField.coordinate(H.chart, 2))
    omega = fixtures.transz_omega().omega
    expected = tangent_tensor(form_from_literal(T.chart, {"dz": 1, "dx": "-y"}), VectorField.coordinate(T.chart, 2))
    assert zeta_of_form(T, omega) == expected
    assert zeta_of_form(H, fixtures.heis3_kappa()) == Form.identity(H.chart)


def test_zeta_of_form_rejects_wrong_values():
    with pytest.raises(ValueError):
        zeta_of_form(H, Form.dx(H.chart, 0))


def test_horizontal_and_equivariant_examples():
    dxdy = form_from_literal(T.chart, {"dx^dy": 1})
    assert is_basic(T, dxdy)
    dz = Form.dx(T.chart, 2)
    assert is_equivariant(T, dz) and not is_horizontal(T, dz)
    A = fixtures.rot2()
    omega = fixtures.rot2_omega().omega.with_kind(SCALAR)
    assert is_equivariant(A, omega)
    cert = is_horizontal(A, omega)
    assert not cert and cert.items["e1"] == Form.function(A.chart, 1)


def test_heis3_equivariance_uses_adjoint():
    # e3 is central, so e3 (x) dx is equivariant; a constant e1 is not since ad(e2) e1 = -e3
    assert is_equivariant(H, gform(H, {"e3": {"dx": 1}}))
    cert = is_equivariant(H, gform(H, {"e1": {"1": 1}}))
    assert cert.failures == ["e2"] and cert.items["e2"] == gform(H, {"e3": {"1": -1}})
    psi = gform(H, {"e1": {"1": 1}, "e3": {"1": "y"}})
    assert is_basic(H, psi)


def test_zeta_identities_examples():
    omega = fixtures.transz_omega().omega
    psi = gform(T, {"e1": {"dx": 1}})
    cert = check_zeta_identities(T, psi, psi, omega)
    assert cert and all(cert.preconditions)
    kappa = fixtures.heis3_kappa()
    basic = gform(H, {"e1": {"1": 1}, "e2": {"1": 2}, "e3": {"1": "y - 2*x + 5"}})
    cert = check_zeta_identities(H, basic, basic, kappa)
    assert cert
    item4 = "(4) 1/2 [Phi, Phi] + zeta_Omega"
    assert cert.items[item4].is_zero()


def test_zeta_identities_failure_probe():
    psi = gform(T, {"e1": {"dz": 1}})
    cert = check_zeta_identities(T, psi, psi, fixtures.transz_omega().omega)
    assert not cert
    assert "psi basic" in cert.failures
    pre = {p.name: p for p in cert.preconditions}
    assert pre["psi basic"].items["horizontal e1"] == gform(T, {"e1": {"1": 1}})


def test_dual_action_examples():
    assert verify_dual_action(H, fixtures.heis3_dual())
    assert verify_dual_action(T, T)
    cert = verify_dual_action(H, H)
    assert not cert
    assert "anti-homomorphism (0,1)" in cert.failures
    # zeta_1 = d/dx does not commute with zeta_2 = d/dy + x d/dz either
    assert "centralizer (0,1)" in cert.failures


@settings(max_examples=20)
@given(st.integers(0, 10**6), st.integers(0, 2), st.integers(0, 2))
def test_zeta_identities_on_random_transz_basic_pairs(seed, p, q):
    rng = random.Random(seed)
    kind = algebra_kind(T.algebra)
    phi = random_transz_basic(T, p, rng, kind)
    psi = random_transz_basic(T, q, rng, kind)
    assert check_zeta_identities(T, phi, psi, fixtures.transz_omega().omega)


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_zeta_identities_on_random_heis3_basic_pairs(seed):
    rng = random.Random(seed)
    phi, psi = random_heis3_basic(H, rng), random_heis3_basic(H, rng)
    assert check_zeta_identities(H, phi, psi, fixtures.heis3_kappa())


@pytest.mark.parametrize("name", ["heis3", "sl2r", "aff1", "rot2", "transz"])
@settings(max_examples=20)
@given(base=vectors(3), delta=vectors(3))
def test_rank_is_lower_semicontinuous(name, base, delta):
    A = getattr(fixtures, name)()
    n = A.chart.nvars
    x = base[:n]
    if not A.chart.point_allowed(x):
        return
    y = [a + b / 1000 for a, b in zip(x, delta[:n])]
    if not A.chart.point_allowed(y):
        return
    assert analyze_point(A, y).rank >= analyze_point(A, x).rank
