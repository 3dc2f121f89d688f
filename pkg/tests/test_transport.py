import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmanifolds import fixtures
from gmanifolds.action import GAction
from gmanifolds.calculus import Chart, VectorField
from gmanifolds.connection import christoffel_connection, horizontal_lift
from gmanifolds.homogeneous import MatrixGroupChart
from gmanifolds.lie import LieAlgebra
from gmanifolds.transport import (
    CurveSpec,
    OdeError,
    OdeSettings,
    Word,
    ad_via_flow,
    cartan_develop,
    flow,
    flow_result,
    holonomy_curvature_check,
    holonomy_loop,
    lift_curve,
    line_integral,
    parallel_transport,
    pt_tangent_defect,
    word_apply,
)

H = fixtures.heis3()


def close(a, b, tol):
    return max(abs(float(x) - float(y)) for x, y in zip(a, b)) < tol


def field(chart, *exprs):
    return VectorField(chart, [chart.parse(str(e)) for e in exprs])


def test_flow_examples():
    R3 = H.chart
    assert close(flow(VectorField.coordinate(R3, 0), [0, 0, 0], 1), [1, 0, 0], 1e-12)
    line = Chart(["x"])
    assert abs(flow(field(line, "x"), [1], math.log(2))[0] - 2.0) < 1e-9
    for a in (0, 1.5, -2):
        assert close(flow(H.fundamentals[1], [a, 0, 0], 1), [a, 1, a], 1e-12)


def test_flow_reports_richardson_discrepancy():
    line = Chart(["x"])
    res = flow_result(field(line, "x"), [1], 1)
    assert res.discrepancy is not None and res.discrepancy < 1e-12
    with pytest.raises(OdeError):
        # x' = x^2 blows up at t = 1
        flow(field(line, "x^2"), [1], 0.999, OdeSettings(steps_per_unit_time=20))


def test_settings_validation():
    with pytest.raises(ValueError):
        OdeSettings(steps_per_unit_time=0)
    assert OdeSettings(steps_per_unit_time=10).steps_for(0.25) == 3


def test_rk4_error_drops_by_at_least_eight_per_halving():
    line = Chart(["x"])
    xi = field(line, "x")
    errs = [abs(flow(xi, [1], 1, OdeSettings(n, False))[0] - math.e) for n in (10, 20, 40)]
    assert errs[0] / errs[1] >= 8 and errs[1] / errs[2] >= 8


def test_word_examples():
    x0 = [0.25, -1, 2]
    assert word_apply(H, Word(), x0) == x0
    e1, e2 = (1, 0, 0), (0, 1, 0)
    assert close(word_apply(H, Word.of([(e1, 1), (e2, 1)]), [0, 0, 0]), [1, 1, 1], 1e-12)
    assert close(word_apply(H, Word.of([(e2, 1), (e1, 1)]), [0, 0, 0]), [1, 1, 0], 1e-12)
    w = Word.of([(e1, 1), (e2, Fraction(1, 2)), (e1, -1)])
    assert close(word_apply(H, w.inverse(), word_apply(H, w, x0)), x0, 1e-9)


@settings(max_examples=15)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.2, 2), st.floats(-1, 1))
def test_commuting_flows_commute(s, t, x, y):
    # rotation and radial dilation commute
    chart = fixtures.rot2().chart
    rot, rad = fixtures.rot2().fundamentals[0], field(chart, "x", "y")
    assert rot.bracket(rad).is_zero()
    a = flow(rad, flow(rot, [x, y], s), t)
    b = flow(rot, flow(rad, [x, y], t), s)
    assert close(a, b, 1e-8)


def test_ad_via_flow_examples():
    probes = [[0, 0, 0], [1, 2, 3], [-1, 0.5, 2], [0.3, -0.7, 1], [2, 1, -1]]
    cert = ad_via_flow(H, [1, 0, 0], 1, [0, 1, 0], probes, exact_inverse_flow=["x - 1", "y", "z"])
    assert cert and max(cert.items.values()) < 1e-6
    T = fixtures.transz()
    assert ad_via_flow(T, [1], 0.7, [1], [[0, 0, 0], [1, 1, 1]])
    S = fixtures.sl2r()
    assert ad_via_flow(S, [0, 1, 0], 0.1, [1, 0, 0], [[-0.5], [0.2], [1.0]])


def test_ad_via_flow_detects_wrong_action():
    # flipping the sign of zeta(e3) breaks the homomorphism, so Ad via flows disagrees
    A = fixtures.heis3()
    bad = GAction(A.algebra, A.chart, [A.fundamentals[0], A.fundamentals[1], -A.fundamentals[2]])
    assert not ad_via_flow(bad, [1, 0, 0], 1, [0, 1, 0], [[0, 0, 0], [1, 1, 1]])


def test_lift_curve_examples():
    c = CurveSpec(3, [(0, 1, ["t", "t", "0"])])
    lifted = lift_curve(H, c, OdeSettings(10))
    for t, b in zip(lifted.times, lifted.values):
        assert close(b, [1, 1, -t], 1e-12)
    still = lift_curve(H, CurveSpec(3, [(0, 1, ["1", "2", "3"])]), OdeSettings(10))
    assert all(close(b, [0, 0, 0], 1e-15) for b in still.values)
    R = fixtures.rot2()
    circle = CurveSpec(2, [(0, 1, ["(1-t^2)/(1+t^2)", "2*t/(1+t^2)"])])
    lifted = lift_curve(R, circle, OdeSettings(10))
    for t, b in zip(lifted.times, lifted.values):
        assert abs(b[0] - 2 / (1 + t * t)) < 1e-12
    with pytest.raises(OdeError):
        lift_curve(R, CurveSpec(2, [(0, 1, ["1 + t", "0"])]), OdeSettings(10))


def test_cartan_developing_is_path_independent():
    G = fixtures.heisenberg_group()
    paths = [
        CurveSpec.polyline([[0, 0, 0], [1, 1, 0]]),
        CurveSpec.polyline([[0, 0, 0], [1, 0, 0], [1, 1, 0]]),
        CurveSpec(3, [(0, 1, ["t^2", "t", "t - t^3"])]),
    ]
    ends = [cartan_develop(H, G, c) for c in paths]
    for e in ends:
        assert close(e, [1, 1, 0], 1e-6)
    assert close(cartan_develop(H, G, CurveSpec(3, [(0, 1, ["0", "0", "0"])])), G.identity_coords, 1e-15)


def test_cartan_developing_on_abelian_group_is_displacement():
    L = LieAlgebra(["e1", "e2"], [[[0, 0], [0, 0]], [[0, 0], [0, 0]]], matrix_rep=[
        [[0, 0, 1], [0, 0, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 0, 1], [0, 0, 0]],
    ])
    chart = Chart(["x", "y"])
    A = GAction(L, chart, [VectorField.coordinate(chart, 0), VectorField.coordinate(chart, 1)])
    gc = Chart(["a", "b"])
    G = MatrixGroupChart(L, gc, [[1, 0, "a"], [0, 1, "b"], [0, 0, 1]], [[1, 0, "-a"], [0, 1, "-b"], [0, 0, 1]], [0, 0])
    c = CurveSpec(2, [(0, 1, ["2*t^3", "t - t^2 - 1/2*t"])])
    assert close(cartan_develop(A, G, c), [2, -0.5], 1e-9)


def test_horizontal_lift_examples():
    B = fixtures.bund1()
    C = christoffel_connection(B)
    base = B.base_chart
    dx, dy = VectorField.coordinate(base, 0), VectorField.coordinate(base, 1)
    assert horizontal_lift(C, B, dx) == field(B.chart, 1, 0, "-y")
    assert horizontal_lift(C, B, dy) == field(B.chart, 0, 1, 0)
    flat = fixtures.bundle(["x", "y"], {})
    xi = field(base, "x*y", "1")
    assert horizontal_lift(christoffel_connection(flat), flat, xi) == field(flat.chart, "x*y", 1, 0)


def test_parallel_transport_examples():
    line = fixtures.bundle(["u"], {"u": "u"})
    assert abs(parallel_transport(line, CurveSpec.polyline([[0], [1]]), [0])[0] - 0.5) < 1e-8
    flat = fixtures.bundle(["x", "y"], {})
    c = CurveSpec(2, [(0, 1, ["t^2", "1 - t"])])
    assert parallel_transport(flat, c, [3])[0] == 3
    B = fixtures.bund1()
    assert abs(parallel_transport(B, CurveSpec.polyline([[0, 0], [1, 0]]), [0.7])[0] - 0.7) < 1e-15
    with pytest.raises(ValueError):
        parallel_transport(B, CurveSpec.polyline([[0], [1]]), [0])


def test_bund1_unit_square_holonomy():
    B = fixtures.bund1()
    loop = CurveSpec.square([0, 0], 1)
    disp = holonomy_loop(B, loop, [0])
    assert abs(abs(disp[0]) - 1.0) < 1e-6
    quad = line_integral(B, loop, [0])
    assert math.copysign(1, disp[0]) == math.copysign(1, quad[0])
    assert abs(disp[0] - quad[0]) < 1e-9
    with pytest.raises(ValueError):
        holonomy_loop(B, CurveSpec.polyline([[0, 0], [1, 0]]), [0])


def test_flat_loop_has_no_holonomy():
    flat = fixtures.bundle(["x", "y"], {})
    assert holonomy_loop(flat, CurveSpec.square([0, 0], 1), [2]) == [0.0]
    exact = fixtures.bundle(["x", "y"], {"x": "x"})
    assert abs(holonomy_loop(exact, CurveSpec.square([0.5, 0.5], 1), [0])[0]) < 1e-12


def test_holonomy_curvature_convergence_on_curved_bundle():
    # Gamma = -(1+x^2) y dx has non-constant curvature, so the h^2 error is visible
    B = fixtures.bundle(["x", "y"], {"x": "-(1+x^2)*y"})
    report = holonomy_curvature_check(B, [0, 0], [0.2, 0.1, 0.05], [[0]])
    assert not report.at_roundoff
    assert report.min_order() >= 1.9
    assert report.errors[0] > report.errors[1] > report.errors[2]


def test_holonomy_curvature_on_bund1_is_exact():
    # BUND1 has constant curvature and Gamma linear in y: holonomy is exactly h^2
    report = holonomy_curvature_check(fixtures.bund1(), [0, 0], [0.2, 0.1, 0.05], [[0], [1]])
    assert report.at_roundoff and report.min_order() == math.inf
    for h in (0.2, 0.1, 0.05):
        disp = holonomy_loop(fixtures.bund1(), CurveSpec.square([0, 0], Fraction(h)), [0])
        assert abs(disp[0] - h * h) < 1e-12


def test_flat_bundle_holonomy_vanishes_faster_than_h_squared():
    B = fixtures.bundle(["x", "y"], {"x": "x"})
    report = holonomy_curvature_check(B, [0.3, 0.1], [0.2, 0.1, 0.05], [[0]])
    assert max(report.errors) < 1e-10


def test_reparametrization_invariance():
    B = fixtures.bund1()
    c = CurveSpec(2, [(0, 1, ["t", "t^2 + 1"])])
    for f in ("t^2", "t^3", "(t + t^3)/2"):
        a = parallel_transport(B, c, [0.4])
        b = parallel_transport(B, c.reparametrize(f), [0.4])
        assert abs(a[0] - b[0]) < 1e-7
    with pytest.raises(ValueError):
        c.reparametrize("2*t")


def test_zeta_relatedness():
    B = fixtures.bund1()
    for c in (CurveSpec.square([0, 0], 1), CurveSpec(2, [(0, 1, ["t", "t^2 + 1"])])):
        assert pt_tangent_defect(B, c, [0.3], [1]) < 1e-6


def test_curve_validation():
    with pytest.raises(ValueError):
        CurveSpec(2, [(0, 1, ["t"])])
    with pytest.raises(ValueError):
        CurveSpec(1, [(0, Fraction(1, 2), ["t"]), (Fraction(1, 2), 1, ["t + 1"])])
    with pytest.raises(ValueError):
        CurveSpec(1, [])
    assert CurveSpec.square([0, 0], 1).is_closed()
