"""Principal connections, connection forms, curvature and covariant derivatives."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .action import GAction, analyze_point, is_basic, is_horizontal, zeta_of_form
from .brackets import (
    ad_representation,
    alg_bracket,
    compose_tangent,
    fn_bracket,
    insertion,
    rho_wedge,
)
from .calculus import (
    Chart,
    Form,
    VectorField,
    exterior_derivative,
    interior_product,
    lie_derivative,
    linear_pullback,
    rational_sample,
    tangent_kind,
)
from .certificate import Certificate, exact_certificate
from .lie import normalizer


class CurvatureRouteMismatch(AssertionError):
    """The bracket route and the projection route to the curvature disagree."""


@dataclass(frozen=True)
class Connection:
    action: GAction
    phi: Form

    @property
    def chart(self) -> Chart:
        return self.action.chart

    def chi_matrix(self) -> list[list]:
        """Matrix of the horizontal projection Id - Phi."""
        M = self.phi.matrix()
        n = self.chart.nvars
        one, zero = self.chart.one(), self.chart.zero()
        return [[(one if i == j else zero) - M[i][j] for j in range(n)] for i in range(n)]

    def chi(self) -> Form:
        return Form.from_matrix(self.chart, self.chi_matrix())


@dataclass(frozen=True)
class ConnectionForm:
    action: GAction
    omega: Form


def _ad(action: GAction):
    return ad_representation(action.algebra)


def _symbolic_free(action: GAction) -> bool:
    return linalg.rank(action.zeta_matrix()) == action.algebra.dim


def verify_connection(C: Connection, samples: Sequence[Sequence] | None = None, seed: int = 0) -> Certificate:
    A, Phi = C.action, C.phi
    if Phi.kind.kind != "tangent" or Phi.degree != 1:
        raise ValueError("a principal connection is a tangent-valued 1-form")
    items = {"projection Phi o Phi - Phi": compose_tangent(Phi, Phi) - Phi}
    for i, f in enumerate(A.fundamentals):
        items[f"equivariance [zeta_{A.algebra.basis_names[i]}, Phi]"] = fn_bracket(Form.from_vector_field(f), Phi)
    if samples is None:
        dens = [v for vals in Phi.terms.values() for v in vals]
        dens += [c for f in A.fundamentals for c in f.components]
        samples = rational_sample(A.chart, 3, seed, dens)
    for pt in samples:
        Z = A.zeta_matrix_at(pt)
        P = [[v.evaluate(pt) for v in row] for row in Phi.matrix()]
        rz = linalg.rank(Z)
        rp = linalg.rank(P)
        joint = linalg.rank(linalg.transpose(linalg.transpose(Z) + linalg.transpose(P)))
        # image(Phi_x) = g(x): equal dimension and the joint span adds nothing
        items[f"image at {tuple(str(v) for v in pt)}"] = Fraction(abs(rz - rp) + abs(joint - rz))
    return exact_certificate("connection", items)


def verify_connection_form(wc: ConnectionForm) -> Certificate:
    A, omega = wc.action, wc.omega
    if omega.kind.kind != "vector" or omega.kind.dim != A.algebra.dim or omega.degree != 1:
        raise ValueError("a connection form is a g-valued 1-form")
    ad = _ad(A)
    items = {}
    for i, f in enumerate(A.fundamentals):
        items[f"(1) L_zeta_{A.algebra.basis_names[i]} omega + ad omega"] = lie_derivative(f, omega) + omega.map_values(ad[i], omega.kind)
    Z = A.zeta_matrix()
    W = omega.matrix()
    WZ = linalg.matmul(W, Z)
    ZWZ = linalg.matmul(Z, WZ)
    items["(2) zeta omega zeta - zeta"] = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(ZWZ, Z)]
    return exact_certificate("connection form", items)


def connection_from_form(wc: ConnectionForm, check: bool = True) -> Connection:
    if check:
        cert = verify_connection_form(wc)
        if not cert:
            raise ValueError(f"invalid connection form: {cert.summary()}")
    return Connection(wc.action, zeta_of_form(wc.action, wc.omega))


def curvature_projection(C: Connection) -> Form:
    """R(d_i, d_j) = Phi [chi d_i, chi d_j] on coordinate fields."""
    chart = C.chart
    n = chart.nvars
    chi = C.chi_matrix()
    hor = [VectorField(chart, [chi[a][j] for a in range(n)]) for j in range(n)]
    M = C.phi.matrix()
    terms = {}
    for i in range(n):
        for j in range(i + 1, n):
            br = hor[i].bracket(hor[j])
            terms[(i, j)] = [sum((M[a][b] * br.components[b] for b in range(n)), chart.zero()) for a in range(n)]
    return Form(chart, 2, tangent_kind(chart), terms)


def curvature(C: Connection) -> Form:
    half = C.chart.const(Fraction(1, 2))
    R = fn_bracket(C.phi, C.phi).scale(half)
    if R != curvature_projection(C):
        raise CurvatureRouteMismatch("1/2 [Phi, Phi] differs from Phi[chi, chi]")
    return R


def curvature_form(wc: ConnectionForm, check: bool = True) -> Form:
    """Omega = d omega + 1/2 [omega, omega]; optionally asserts R = -zeta_Omega."""
    omega = wc.omega
    half = omega.chart.const(Fraction(1, 2))
    Omega = exterior_derivative(omega) + alg_bracket(omega, omega).scale(half)
    if check:
        R = curvature(connection_from_form(wc, check=False))
        if R != -zeta_of_form(wc.action, Omega):
            raise CurvatureRouteMismatch("R differs from -zeta_Omega")
    return Omega


def bianchi(C: Connection | None = None, wc: ConnectionForm | None = None) -> Certificate:
    items = {}
    if wc is not None and C is None:
        C = connection_from_form(wc, check=False)
    if C is not None:
        items["[Phi, R]"] = fn_bracket(C.phi, curvature(C))
    if wc is not None:
        Omega = curvature_form(wc, check=False)
        items["d Omega + [omega, Omega]"] = exterior_derivative(Omega) + alg_bracket(wc.omega, Omega)
    return exact_certificate("bianchi", items)


def cov_deriv_phi(C: Connection, psi: Form) -> Form:
    """d_Phi psi = chi^* d psi."""
    return linear_pullback(exterior_derivative(psi), C.chi_matrix())


def chi_pullback(C: Connection, psi: Form) -> Form:
    return linear_pullback(psi, C.chi_matrix())


def cov_deriv_omega(wc: ConnectionForm, Psi: Form, rho=None) -> Form:
    """d_omega Psi = d Psi + rho^(omega) Psi; rho defaults to ad for g-valued Psi."""
    if rho is None:
        if Psi.kind.kind == "vector" and Psi.kind.algebra is not None:
            rho = _ad(wc.action)
        else:
            return exterior_derivative(Psi)
    return exterior_derivative(Psi) + rho_wedge(wc.omega, Psi, rho)


def _rho_of_function(chart: Chart, rho, Y: Sequence) -> list[list]:
    """rho(Y) for a g-valued function Y (coefficients may be rational functions)."""
    m = len(rho[0])
    zero = chart.zero()
    out = [[zero] * m for _ in range(m)]
    for c, mat in zip(Y, rho):
        if c.is_zero():
            continue
        for a in range(m):
            for b in range(m):
                if mat[a][b]:
                    out[a][b] = out[a][b] + c * mat[a][b]
    return out


def omega_on_fundamental(wc: ConnectionForm, i: int) -> tuple:
    """omega(zeta(e_i)) as a g-valued function."""
    return interior_product(wc.action.fundamentals[i], wc.omega).terms.get((), (wc.omega.chart.zero(),) * wc.action.algebra.dim)


def check_basic_identities(
    C: Connection,
    wc: ConnectionForm | None = None,
    psi: Form | None = None,
    Psi: Form | None = None,
    rho=None,
) -> Certificate:
    """Covariant derivative identities for basic psi (g-valued) and basic Psi (rho-valued)."""
    A = C.action
    chart = C.chart
    pre: list[Certificate] = []
    items: dict = {}
    notes: list[str] = []
    if psi is not None:
        pre.append(_named(is_basic(A, psi), "psi basic"))
        zpsi = zeta_of_form(A, psi)
        bracket = fn_bracket(C.phi, zpsi)
        for k, v in is_horizontal(A, bracket).items.items():
            items[f"(1) [Phi, zeta_psi] horizontal {k}"] = v
        for i, f in enumerate(A.fundamentals):
            items[f"(1) [Phi, zeta_psi] equivariant {A.algebra.basis_names[i]}"] = fn_bracket(Form.from_vector_field(f), bracket)
        items["(1) [Phi, zeta_psi] vertical"] = bracket.map_values(C.chi_matrix(), bracket.kind)
        dpsi = cov_deriv_phi(C, psi)
        for k, v in is_basic(A, dpsi).items.items():
            items[f"(2) d_Phi psi {k}"] = v
        items["(3) zeta_(d_Phi psi) + [Phi, zeta_psi]"] = zeta_of_form(A, dpsi) + bracket
    if Psi is not None:
        if wc is None:
            raise ValueError("item (4) needs a connection form")
        if rho is None:
            rho = _ad(A) if Psi.kind.algebra is not None else [[[0] * Psi.kind.dim for _ in range(Psi.kind.dim)]] * A.algebra.dim
        pre.append(_named(is_basic(A, Psi, rho), "Psi basic"))
        dPsi = cov_deriv_phi(C, Psi)
        for k, v in is_basic(A, dPsi, rho).items.items():
            items[f"(2) d_Phi Psi {k}"] = v
        dw = cov_deriv_omega(wc, Psi, rho)
        for i, f in enumerate(A.fundamentals):
            Y = [v - int(k == i) for k, v in enumerate(omega_on_fundamental(wc, i))]
            rhs = Psi.map_values(_rho_of_function(chart, rho, Y), Psi.kind)
            lhs = interior_product(f, dw)
            items[f"(4) i(zeta_{A.algebra.basis_names[i]}) d_omega Psi - rho(omega(zeta) - X) Psi"] = lhs - rhs
        if _symbolic_free(A):
            items["(4) free: d_Phi Psi - d_omega Psi"] = dPsi - dw
        else:
            notes.append("action not free: d_Phi = d_omega not required")
    cert = exact_certificate("basic identities", items, notes)
    cert.preconditions = pre
    if not all(pre):
        cert.passed = False
        cert.failures.extend(p.name for p in pre if not p)
    return cert


def _named(cert: Certificate, name: str) -> Certificate:
    cert.name = name
    return cert


def check_covariant_identities(C: Connection, wc: ConnectionForm | None = None, psis: Sequence[Form] = ()) -> Certificate:
    R = curvature(C)
    items: dict = {}
    for n, psi in enumerate(psis):
        items[f"(1) psi{n}: d_Phi chi* psi - d_Phi psi - chi* i_R psi"] = (
            cov_deriv_phi(C, chi_pullback(C, psi)) - cov_deriv_phi(C, psi) - chi_pullback(C, insertion(R, psi))
        )
        items[f"(2) psi{n}: d_Phi d_Phi psi - chi* i_R d psi"] = cov_deriv_phi(C, cov_deriv_phi(C, psi)) - chi_pullback(
            C, insertion(R, exterior_derivative(psi))
        )
    notes = []
    if wc is not None:
        A = wc.action
        Omega = curvature_form(wc, check=False)
        for i, f in enumerate(A.fundamentals):
            w = omega_on_fundamental(wc, i)
            Y = Form.function(A.chart, [v - int(k == i) for k, v in enumerate(w)], wc.omega.kind)
            rhs = alg_bracket(Y, wc.omega) - exterior_derivative(Form.function(A.chart, w, wc.omega.kind))
            items[f"(3) i(zeta_{A.algebra.basis_names[i]}) Omega - rhs"] = interior_product(f, Omega) - rhs
        if _symbolic_free(A):
            for k, v in is_horizontal(A, Omega).items.items():
                items[f"(3) free: Omega horizontal {k}"] = v
            items["(3) free: Omega - d_Phi omega"] = Omega - cov_deriv_phi(C, wc.omega)
            # d_omega omega agrees with Omega on horizontal vectors only
            items["(3) free: Omega - chi* d_omega omega"] = Omega - chi_pullback(C, cov_deriv_omega(wc, wc.omega))
    return exact_certificate("covariant identities", items, notes)


# local bundles -----------------------------------------------------------------------


class LocalBundle:
    """Trivial bundle base x fiber with a fiber action and a Christoffel form.

    ``christoffel`` maps each base variable name to the components (in fiber
    directions) of the fiber vector field Gamma(d/d base_var); components are
    rational functions on the product chart.
    """

    def __init__(self, base_chart: Chart, fiber_action: GAction, christoffel: Mapping[str, Sequence], name: str = ""):
        self.base_chart = base_chart
        self.fiber_action = fiber_action
        self.name = name
        fiber = fiber_action.chart
        overlap = set(base_chart.var_names) & set(fiber.var_names)
        if overlap:
            raise ValueError(f"base and fiber variables overlap: {sorted(overlap)}")
        self.chart = Chart(base_chart.var_names + fiber.var_names, [str(e) for e in base_chart.excluded_locus])
        nb, nf = base_chart.nvars, fiber.nvars
        zero = self.chart.zero()
        terms = {}
        for var, comps in christoffel.items():
            if var not in base_chart.var_names:
                raise ValueError(f"unknown base variable {var!r} in Christoffel form")
            if len(comps) != nf:
                raise ValueError(f"Christoffel value for {var} needs {nf} fiber components")
            terms[(base_chart.index(var),)] = [zero] * nb + [self.chart.coerce(c) for c in comps]
        self.gamma = Form(self.chart, 1, tangent_kind(self.chart), terms)
        lifted = [self.lift_fiber_field(f) for f in fiber_action.fundamentals]
        self.action = GAction(fiber_action.algebra, self.chart, lifted, name=f"{name or 'bundle'} fiber action")

    @property
    def base_dim(self) -> int:
        return self.base_chart.nvars

    def lift_fiber_field(self, f: VectorField) -> VectorField:
        fiber = self.fiber_action.chart
        subs = [self.chart.var(v) for v in fiber.var_names]
        comps = [self.chart.zero()] * self.base_dim + [c.compose(subs) for c in f.components]
        return VectorField(self.chart, comps)

    def gamma_value(self, i: int) -> VectorField:
        vals = self.gamma.terms.get((i,), (self.chart.zero(),) * self.chart.nvars)
        return VectorField(self.chart, vals)

    def check_centralizer(self) -> Certificate:
        items = {}
        for i in range(self.base_dim):
            for a, f in enumerate(self.action.fundamentals):
                items[f"[Gamma(d/d{self.base_chart.var_names[i]}), zeta_{a}]"] = self.gamma_value(i).bracket(f)
        return exact_certificate("centralizer", items)


def christoffel_connection(B: LocalBundle) -> Connection:
    cert = B.check_centralizer()
    if not cert:
        raise ValueError(f"Christoffel form leaves the centralizer: {cert.summary()}")
    chart = B.chart
    n, nb = chart.nvars, B.base_dim
    vert = Form(chart, 1, tangent_kind(chart), {(j,): [chart.const(int(i == j)) for i in range(n)] for j in range(nb, n)})
    return Connection(B.action, vert - B.gamma)


def christoffel_curvature(B: LocalBundle) -> Form:
    """d Gamma + 1/2 [Gamma, Gamma] with d in base directions and the Lie bracket of fiber fields."""
    chart = B.chart
    nb = B.base_dim
    terms = {}
    for a in range(nb):
        for b in range(a + 1, nb):
            Ga, Gb = B.gamma_value(a), B.gamma_value(b)
            comps = [gb.diff(a) - ga.diff(b) for ga, gb in zip(Ga.components, Gb.components)]
            br = Ga.bracket(Gb)
            terms[(a, b)] = [c + e for c, e in zip(comps, br.components)]
    return Form(chart, 2, tangent_kind(chart), terms)


def horizontal_lift(C: Connection, B: LocalBundle, xi: VectorField) -> VectorField:
    """C(xi) = xi + Gamma(xi) on the product chart."""
    if xi.chart != B.base_chart:
        raise ValueError("horizontal lift needs a base vector field")
    chart = B.chart
    subs = [chart.var(v) for v in B.base_chart.var_names]
    base = VectorField(chart, [c.compose(subs) for c in xi.components] + [chart.zero()] * (chart.nvars - B.base_dim))
    lift = base
    for i, c in enumerate(base.components[: B.base_dim]):
        if not c.is_zero():
            lift = lift + B.gamma_value(i).scale(c)
    return lift


def check_horizontal_lift(C: Connection, B: LocalBundle, xi: VectorField) -> Certificate:
    lift = horizontal_lift(C, B, xi)
    items = {f"[zeta_{a}, C(xi)]": f.bracket(lift) for a, f in enumerate(C.action.fundamentals)}
    items["Phi(C(xi))"] = VectorField(C.chart, [
        sum((row[j] * lift.components[j] for j in range(C.chart.nvars)), C.chart.zero()) for row in C.phi.matrix()
    ])
    return exact_certificate("horizontal lift", items)


def is_asystatic(A: GAction, x: Sequence) -> bool:
    iso = analyze_point(A, x).isotropy
    return normalizer(A.algebra, iso) == iso
