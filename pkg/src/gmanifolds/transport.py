"""Numerical layer: flows, words of flows, curve lifting, developing and parallel transport.

Rational functions are compiled to float callables once; integration is
fixed-step RK4, optionally verified by repeating with twice the steps.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .action import GAction
from .calculus import VectorField
from .certificate import Certificate, numeric_certificate
from .connection import Connection, LocalBundle, check_horizontal_lift, curvature, horizontal_lift
from .homogeneous import MatrixGroupChart
from .lie import exp_ad
from .ratfunc import RationalFunction

__all__ = [
    "OdeSettings",
    "OdeError",
    "CurveSpec",
    "Word",
    "flow",
    "word_apply",
    "ad_via_flow",
    "lift_curve",
    "cartan_develop",
    "horizontal_lift",
    "check_horizontal_lift",
    "parallel_transport",
    "holonomy_loop",
    "line_integral",
    "holonomy_curvature_check",
]


class OdeError(RuntimeError):
    """Integration failed: blow-up, a vanishing denominator or step-halving disagreement."""


@dataclass(frozen=True)
class OdeSettings:
    steps_per_unit_time: int = 1000
    richardson_check: bool = True
    richardson_tol: float = 1e-6

    def __post_init__(self):
        if self.steps_per_unit_time < 1:
            raise ValueError("steps_per_unit_time must be at least 1")

    def steps_for(self, duration: float) -> int:
        return max(1, math.ceil(self.steps_per_unit_time * abs(duration) - 1e-9))


# compilation -------------------------------------------------------------------------


def _poly_source(p, nvars: int) -> str:
    terms = []
    for mono, coeff in p.terms():
        factors = [repr(float(coeff))]
        for i, e in enumerate(mono):
            if e == 1:
                factors.append(f"x[{i}]")
            elif e:
                factors.append(f"x[{i}]**{e}")
        terms.append("*".join(factors))
    return " + ".join(terms) if terms else "0.0"


def compile_function(f: RationalFunction) -> Callable[[Sequence[float]], float]:
    nvars = len(f.names)
    num = _poly_source(f.num, nvars)
    if f.den.is_ground:
        scale = 1.0 / float(f.den.LC)
        src = f"lambda x: ({num}) * {scale!r}"
    else:
        src = f"lambda x: ({num}) / ({_poly_source(f.den, nvars)})"
    return eval(src, {"__builtins__": {}})


def compile_field(xi: VectorField) -> Callable[[Sequence[float]], list]:
    comps = [compile_function(c) for c in xi.components]
    return lambda x: [c(x) for c in comps]


# integration -------------------------------------------------------------------------


def _rk4(rhs: Callable, y0: Sequence[float], t0: float, t1: float, steps: int) -> list[float]:
    h = (t1 - t0) / steps
    y = [float(v) for v in y0]
    t = t0
    try:
        for _ in range(steps):
            k1 = rhs(t, y)
            k2 = rhs(t + h / 2, [a + h / 2 * b for a, b in zip(y, k1)])
            k3 = rhs(t + h / 2, [a + h / 2 * b for a, b in zip(y, k2)])
            k4 = rhs(t + h, [a + h * b for a, b in zip(y, k3)])
            y = [a + h / 6 * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4)]
            t = t0 + h * (_ + 1)
    except (ZeroDivisionError, OverflowError) as exc:
        raise OdeError(f"integration failed near t={t:.6g}: {exc}") from exc
    if not all(math.isfinite(v) for v in y):
        raise OdeError("integration blew up (non-finite state)")
    return y


def _discrepancy(a: Sequence[float], b: Sequence[float]) -> float:
    diff = max((abs(x - y) for x, y in zip(a, b)), default=0.0)
    scale = max(1.0, max((abs(y) for y in b), default=0.0))
    return diff / scale


@dataclass
class OdeResult:
    value: list[float]
    steps: int
    discrepancy: float | None = None


def integrate(rhs: Callable, y0: Sequence[float], t0: float, t1: float, settings: OdeSettings) -> OdeResult:
    steps = settings.steps_for(t1 - t0)
    y = _rk4(rhs, y0, t0, t1, steps)
    if not settings.richardson_check:
        return OdeResult(y, steps)
    y2 = _rk4(rhs, y0, t0, t1, 2 * steps)
    disc = _discrepancy(y, y2)
    if disc >= settings.richardson_tol:
        raise OdeError(f"step-halving discrepancy {disc:.3g} exceeds {settings.richardson_tol:g}")
    return OdeResult(y2, 2 * steps, disc)


def flow(xi: VectorField, x0: Sequence, t: float, settings: OdeSettings = OdeSettings()) -> list[float]:
    """Fl^xi_t(x0) by RK4."""
    return flow_result(xi, x0, t, settings).value


def flow_result(xi: VectorField, x0: Sequence, t: float, settings: OdeSettings = OdeSettings()) -> OdeResult:
    f = compile_field(xi)
    if float(t) == 0.0:
        return OdeResult([float(v) for v in x0], 0, 0.0)
    return integrate(lambda _t, y: f(y), x0, 0.0, float(t), settings)


@dataclass(frozen=True)
class Word:
    """Letters (X, t) applied left to right: Fl^{zeta_Xn}_{tn} o ... o Fl^{zeta_X1}_{t1}."""

    letters: tuple = ()

    @classmethod
    def of(cls, letters) -> Word:
        return cls(tuple((tuple(X), t) for X, t in letters))

    def inverse(self) -> Word:
        return Word(tuple((X, -t) for X, t in reversed(self.letters)))


def word_apply(A: GAction, w: Word, x0: Sequence, settings: OdeSettings = OdeSettings()) -> list[float]:
    x = [float(v) for v in x0]
    for X, t in w.letters:
        x = flow(A.zeta(X), x, float(t), settings)
    return x


def ad_via_flow(
    A: GAction,
    X: Sequence,
    t: float,
    Y: Sequence,
    probes: Sequence[Sequence],
    settings: OdeSettings = OdeSettings(),
    tol: float = 1e-5,
    eps: float = 1e-5,
    exact_inverse_flow: Sequence | None = None,
) -> Certificate:
    """Compare T(Fl_-t) zeta_Y(Fl_t x) with zeta(e^{t ad X} Y)(x) at probe points.

    The tangent map is a central difference with step ``eps``; when the inverse
    flow is supplied as a rational map its exact Jacobian is used as a cross-check.
    """
    zX = A.zeta(X)
    zY = compile_field(A.zeta(Y))
    E = exp_ad(A.algebra, X, t)
    n = len(Y)
    if E.exact:
        zT = compile_field(A.zeta([sum(E.matrix[i][j] * Fraction(Y[j]) for j in range(n)) for i in range(n)]))
    else:
        target = [sum(float(E.matrix[i][j]) * float(Y[j]) for j in range(n)) for i in range(n)]
        zT = compile_field(_float_combo(A, target))
    errors = {}
    quiet = OdeSettings(settings.steps_per_unit_time, False)
    jac_exact = None
    if exact_inverse_flow is not None:
        maps = [A.chart.coerce(m) for m in exact_inverse_flow]
        jac_exact = [[compile_function(m.diff(k)) for k in range(A.chart.nvars)] for m in maps]
    for n, x in enumerate(probes):
        x = [float(v) for v in x]
        y = flow(zX, x, t, settings)
        v = zY(y)
        plus = flow(zX, [a + eps * b for a, b in zip(y, v)], -t, quiet)
        minus = flow(zX, [a - eps * b for a, b in zip(y, v)], -t, quiet)
        lhs = [(p - m) / (2 * eps) for p, m in zip(plus, minus)]
        rhs = zT(x)
        scale = max(1e-12, max(abs(r) for r in rhs))
        errors[f"probe {n}"] = max(abs(a - b) for a, b in zip(lhs, rhs)) / scale
        if jac_exact is not None:
            exact_lhs = [sum(row[k](y) * v[k] for k in range(len(v))) for row in jac_exact]
            errors[f"probe {n} exact pushforward"] = max(abs(a - b) for a, b in zip(exact_lhs, rhs)) / scale
            errors[f"probe {n} difference vs exact"] = max(abs(a - b) for a, b in zip(exact_lhs, lhs)) / scale
    return numeric_certificate("ad via flow", errors, tol)


def _float_combo(A: GAction, coeffs: Sequence[float]) -> VectorField:
    """zeta(sum c_i e_i) with float coefficients snapped to nearby rationals for compilation."""
    return A.zeta([Fraction(c).limit_denominator(10**15) for c in coeffs])


# curves ---------------------------------------------------------------------------


class CurveSpec:
    """Piecewise rational curve in a chart, parametrized by a global t over [t_0, t_k].

    Each piece is (start, end, components) with components rational functions of t.
    """

    def __init__(self, dim: int, pieces: Sequence[tuple], var: str = "t", check_continuity: bool = True):
        if not pieces:
            raise ValueError("a curve needs at least one piece")
        self.var = var
        self.dim = dim
        self.pieces = []
        for start, end, comps in pieces:
            comps = [c if isinstance(c, RationalFunction) else RationalFunction.parse(str(c), (var,)) for c in comps]
            if len(comps) != dim:
                raise ValueError(f"curve piece needs {dim} components")
            self.pieces.append((start, end, comps, [c.diff(0) for c in comps]))
        for (s0, e0, c0, _), (s1, e1, c1, _) in zip(self.pieces, self.pieces[1:]):
            if e0 != s1:
                raise ValueError("curve pieces must be contiguous")
            if check_continuity and all(isinstance(v, (int, Fraction)) for v in (e0,)):
                for a, b in zip(c0, c1):
                    if a.evaluate([e0]) != b.evaluate([e0]):
                        raise ValueError(f"curve is discontinuous at t={e0}")
        self._compiled = [
            (float(s), float(e), [compile_function(c) for c in comps], [compile_function(d) for d in ders])
            for s, e, comps, ders in self.pieces
        ]
        self._starts = [p[0] for p in self._compiled]

    @classmethod
    def polyline(cls, points: Sequence[Sequence]) -> CurveSpec:
        """Straight segments through the points, segment k on [k/n, (k+1)/n]."""
        n = len(points) - 1
        if n < 1:
            raise ValueError("a polyline needs at least two points")
        pieces = []
        for k in range(n):
            a, b = [Fraction(v) for v in points[k]], [Fraction(v) for v in points[k + 1]]
            s0, s1 = Fraction(k, n), Fraction(k + 1, n)
            comps = []
            for u, v in zip(a, b):
                slope = (v - u) / (s1 - s0)
                comps.append(f"({u}) + ({slope})*(t - ({s0}))")
            pieces.append((s0, s1, comps))
        return cls(len(points[0]), pieces)

    @classmethod
    def square(cls, corner: Sequence, h, extra: Sequence = ()) -> CurveSpec:
        """Counterclockwise square loop of side h in the first two coordinates."""
        x, y = Fraction(corner[0]), Fraction(corner[1])
        h = Fraction(h)
        rest = [Fraction(v) for v in extra]
        pts = [(x, y), (x + h, y), (x + h, y + h), (x, y + h), (x, y)]
        return cls.polyline([list(p) + rest for p in pts])

    @property
    def start(self):
        return self.pieces[0][0]

    @property
    def end(self):
        return self.pieces[-1][1]

    def _piece(self, t: float) -> int:
        return max(0, min(len(self._compiled) - 1, bisect.bisect_right(self._starts, t) - 1))

    def point(self, t: float) -> list[float]:
        _, _, comps, _ = self._compiled[self._piece(t)]
        return [c([t]) for c in comps]

    def velocity(self, t: float) -> list[float]:
        _, _, _, ders = self._compiled[self._piece(t)]
        return [d([t]) for d in ders]

    def point_in_piece(self, k: int, t: float) -> list[float]:
        return [c([t]) for c in self._compiled[k][2]]

    def velocity_in_piece(self, k: int, t: float) -> list[float]:
        return [d([t]) for d in self._compiled[k][3]]

    def exact_point(self, t) -> tuple:
        for s, e, comps, _ in self.pieces:
            if s <= t <= e:
                return tuple(c.evaluate([t]) for c in comps)
        raise ValueError(f"t={t} outside the curve's domain")

    def is_closed(self, tol: float = 1e-12) -> bool:
        a = self.point_in_piece(0, float(self.start))
        b = self.point_in_piece(len(self.pieces) - 1, float(self.end))
        return max(abs(u - v) for u, v in zip(a, b)) <= tol

    def reparametrize(self, f: str | RationalFunction) -> CurveSpec:
        """c o f for a monotone increasing polynomial f of [start, end] onto itself."""
        fr = f if isinstance(f, RationalFunction) else RationalFunction.parse(str(f), (self.var,))
        fc = compile_function(fr)
        lo, hi = float(self.start), float(self.end)
        if abs(fc([lo]) - lo) > 1e-12 or abs(fc([hi]) - hi) > 1e-12:
            raise ValueError("reparametrization must fix the endpoints")

        def preimage(v: float) -> float:
            a, b = lo, hi
            for _ in range(200):
                mid = (a + b) / 2
                if fc([mid]) < v:
                    a = mid
                else:
                    b = mid
            return (a + b) / 2

        pieces = []
        for s, e, comps, _ in self.pieces:
            s_new = self.start if s == self.start else preimage(float(s))
            e_new = self.end if e == self.end else preimage(float(e))
            pieces.append((s_new, e_new, [c.compose([fr]) for c in comps]))
        return CurveSpec(self.dim, pieces, self.var, check_continuity=False)

    def integrate_along(self, rhs_factory: Callable, y0: Sequence[float], settings: OdeSettings) -> OdeResult:
        """Integrate piece by piece; ``rhs_factory(k)`` gives the right-hand side on piece k."""
        y = [float(v) for v in y0]
        steps_total = 0
        worst = 0.0
        for k, (s, e, _, _) in enumerate(self._compiled):
            res = integrate(rhs_factory(k), y, s, e, settings)
            y = res.value
            steps_total += res.steps
            if res.discrepancy is not None:
                worst = max(worst, res.discrepancy)
        return OdeResult(y, steps_total, worst if settings.richardson_check else None)

    def grid(self, settings: OdeSettings) -> list[tuple[int, float]]:
        out = []
        for k, (s, e, _, _) in enumerate(self._compiled):
            n = settings.steps_for(e - s)
            out.extend((k, s + (e - s) * i / n) for i in range(n + (k == len(self._compiled) - 1)))
        return out


# curve lifting and developing -------------------------------------------------------------


@dataclass
class LiftedCurve:
    times: list[float]
    values: list[list[float]]
    max_residual: float
    certificate: Certificate = field(default=None)


def _pinv_solve(Z: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, float]:
    b = np.linalg.pinv(Z) @ v
    return b.tolist(), float(np.linalg.norm(Z @ b - v))


def lift_curve(A: GAction, c: CurveSpec, settings: OdeSettings = OdeSettings(), tol: float = 1e-8) -> LiftedCurve:
    """b(t) = zeta_{c(t)}^+ c'(t), the minimal-norm preimage, on the ODE grid."""
    zeta = [compile_field(f) for f in A.fundamentals]
    times, values = [], []
    worst = 0.0
    for k, t in c.grid(settings):
        x = c.point_in_piece(k, t)
        Z = np.array([f(x) for f in zeta]).T
        b, res = _pinv_solve(Z, np.array(c.velocity_in_piece(k, t)))
        worst = max(worst, res)
        times.append(t)
        values.append(b)
    cert = numeric_certificate("curve lifting residual", {"max residual": worst}, tol)
    if not cert:
        raise OdeError(f"curve leaves the orbit distribution: residual {worst:.3g} exceeds {tol:g}")
    return LiftedCurve(times, values, worst, cert)


def cartan_develop(
    A: GAction, Gc: MatrixGroupChart, c: CurveSpec, settings: OdeSettings = OdeSettings(), tol: float = 1e-8
) -> list[float]:
    """Integrate g' = L_{b(t)}(g) with b the lift of c, starting at the identity; returns g(1) in chart coordinates."""
    if Gc.algebra != A.algebra:
        raise ValueError("group chart and action use different Lie algebras")
    zeta = [compile_field(f) for f in A.fundamentals]
    left = [compile_field(Gc.left_invariant_field(Gc.algebra.basis_vector(i))) for i in range(A.algebra.dim)]
    worst = [0.0]

    def factory(k):
        def rhs(t, g):
            x = c.point_in_piece(k, t)
            Z = np.array([f(x) for f in zeta]).T
            b, res = _pinv_solve(Z, np.array(c.velocity_in_piece(k, t)))
            worst[0] = max(worst[0], res)
            out = [0.0] * len(g)
            for bi, L in zip(b, left):
                if bi:
                    for j, v in enumerate(L(g)):
                        out[j] += bi * v
            return out

        return rhs

    result = c.integrate_along(factory, Gc.identity_coords, settings)
    if worst[0] >= tol:
        raise OdeError(f"curve leaves the orbit distribution: residual {worst[0]:.3g}")
    return result.value


# parallel transport ------------------------------------------------------------------------


def _gamma_rhs(B: LocalBundle):
    nb = B.base_dim
    gam = [compile_field(B.gamma_value(i)) for i in range(nb)]

    def velocity(base: Sequence[float], dbase: Sequence[float], u: Sequence[float]) -> list[float]:
        pt = list(base) + list(u)
        out = [0.0] * (B.chart.nvars - nb)
        for i in range(nb):
            if dbase[i]:
                vals = gam[i](pt)
                for j in range(len(out)):
                    out[j] += dbase[i] * vals[nb + j]
        return out

    return velocity


def parallel_transport(B: LocalBundle, c: CurveSpec, u0: Sequence, settings: OdeSettings = OdeSettings()) -> list[float]:
    """Fiber endpoint of the horizontal lift of c through u0: u' = Gamma(c'(t))(u)."""
    return parallel_transport_result(B, c, u0, settings).value


def parallel_transport_result(B: LocalBundle, c: CurveSpec, u0: Sequence, settings: OdeSettings = OdeSettings()) -> OdeResult:
    if c.dim != B.base_dim:
        raise ValueError("curve must live in the base chart")
    vel = _gamma_rhs(B)

    def factory(k):
        return lambda t, u: vel(c.point_in_piece(k, t), c.velocity_in_piece(k, t), u)

    return c.integrate_along(factory, u0, settings)


def holonomy_loop(B: LocalBundle, loop: CurveSpec, u0: Sequence, settings: OdeSettings = OdeSettings()) -> list[float]:
    if not loop.is_closed():
        raise ValueError("holonomy needs a closed loop")
    end = parallel_transport(B, loop, u0, settings)
    return [a - float(b) for a, b in zip(end, u0)]


def line_integral(B: LocalBundle, loop: CurveSpec, u0: Sequence, order: int = 8) -> list[float]:
    """Gauss-Legendre quadrature of Gamma(c'(t)) at fixed fiber point u0 (meaningful when Gamma ignores u)."""
    vel = _gamma_rhs(B)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    total = [0.0] * (B.chart.nvars - B.base_dim)
    u = [float(v) for v in u0]
    for k, (s, e, _, _) in enumerate(loop._compiled):
        half, mid = (e - s) / 2, (e + s) / 2
        for x, w in zip(nodes, weights):
            t = mid + half * x
            v = vel(loop.point_in_piece(k, t), loop.velocity_in_piece(k, t), u)
            total = [a + float(w) * half * b for a, b in zip(total, v)]
    return total


@dataclass
class HolonomyReport:
    hs: list[float]
    errors: list[float]
    orders: list[float]
    floor: float

    @property
    def at_roundoff(self) -> bool:
        return max(self.errors) < self.floor

    def min_order(self) -> float:
        return math.inf if self.at_roundoff else min(self.orders)

    def summary(self) -> str:
        errs = ", ".join(f"{e:.3g}" for e in self.errors)
        if self.at_roundoff:
            return f"errors [{errs}] at roundoff floor (holonomy exact up to rounding)"
        return f"errors [{errs}], empirical orders {', '.join(f'{o:.3f}' for o in self.orders)}"


def holonomy_curvature_check(
    B: LocalBundle,
    x: Sequence,
    hs: Sequence[float],
    fiber_points: Sequence[Sequence],
    settings: OdeSettings = OdeSettings(),
    floor: float = 1e-11,
) -> HolonomyReport:
    """Square-loop holonomy at corner x versus h^2 R(d_0, d_1) at the square's centre.

    Errors are relative to max(|h^2 R|, h^2); orders are log2 error ratios for halving h.
    """
    C = _connection(B)
    R = curvature(C)
    nb = B.base_dim
    Rxy = [compile_function(v) for v in R.terms.get((0, 1), (B.chart.zero(),) * B.chart.nvars)]
    errors = []
    for h in hs:
        hq = Fraction(h).limit_denominator(10**9)
        loop = CurveSpec.square(x, hq, [Fraction(v) for v in x[2:nb]])
        worst = 0.0
        for u in fiber_points:
            disp = holonomy_loop(B, loop, u, settings)
            centre = [float(x[0]) + float(hq) / 2, float(x[1]) + float(hq) / 2] + [float(v) for v in x[2:nb]] + [float(v) for v in u]
            expect = [float(hq) ** 2 * Rxy[nb + j](centre) for j in range(len(disp))]
            # relative to h^2 R, or to h^2 itself when the curvature is tiny
            scale = max(float(hq) ** 2, max(abs(e) for e in expect))
            worst = max(worst, max(abs(a - b) for a, b in zip(disp, expect)) / scale)
        errors.append(worst)
    orders = [
        math.log(errors[i] / errors[i + 1]) / math.log(hs[i] / hs[i + 1]) if errors[i + 1] > 0 and errors[i] > 0 else math.inf
        for i in range(len(hs) - 1)
    ]
    return HolonomyReport(list(hs), errors, orders, floor)


def _connection(B: LocalBundle) -> Connection:
    from .connection import christoffel_connection

    return christoffel_connection(B)


def pt_tangent_defect(
    B: LocalBundle, c: CurveSpec, u: Sequence, X: Sequence, settings: OdeSettings = OdeSettings(), eps: float = 1e-5
) -> float:
    """|T(Pt) zeta_X(u) - zeta_X(Pt(u))| with T(Pt) by central differences over fiber perturbations."""
    fiber = B.fiber_action
    zX = compile_field(fiber.zeta(X))
    u = [float(v) for v in u]
    v = zX(u)
    plus = parallel_transport(B, c, [a + eps * b for a, b in zip(u, v)], settings)
    minus = parallel_transport(B, c, [a - eps * b for a, b in zip(u, v)], settings)
    lhs = [(p - m) / (2 * eps) for p, m in zip(plus, minus)]
    rhs = zX(parallel_transport(B, c, u, settings))
    return max(abs(a - b) for a, b in zip(lhs, rhs))
