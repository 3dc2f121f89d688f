"""Infinitesimal actions of a Lie algebra on a chart (g-manifolds)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .brackets import ad_representation, alg_bracket, fn_bracket
from .calculus import Chart, Form, VectorField, interior_product, lie_derivative, tangent_kind
from .certificate import Certificate, exact_certificate
from .lie import LieAlgebra, Subalgebra


class GAction:
    """A chart with vector fields zeta(e_i), one per basis element of the algebra."""

    def __init__(self, algebra: LieAlgebra, chart: Chart, fundamentals: Sequence[VectorField], name: str = ""):
        if len(fundamentals) != algebra.dim:
            raise ValueError(f"need {algebra.dim} fundamental fields, got {len(fundamentals)}")
        for f in fundamentals:
            if f.chart != chart:
                raise ValueError("fundamental fields must live on the action's chart")
        self.algebra = algebra
        self.chart = chart
        self.fundamentals = tuple(fundamentals)
        self.name = name

    def zeta(self, X: Sequence) -> VectorField:
        out = VectorField.zero(self.chart)
        for c, f in zip(X, self.fundamentals):
            if c:
                out = out + f.scale(self.chart.coerce(c))
        return out

    def zeta_matrix(self) -> list[list]:
        """nvars x dim matrix whose column i is zeta(e_i)."""
        return linalg.transpose([f.components for f in self.fundamentals])

    def zeta_matrix_at(self, point: Sequence) -> list[list]:
        return linalg.transpose([f.evaluate(point) for f in self.fundamentals])

    def __repr__(self):
        return f"GAction({self.name or self.algebra.name}, chart={self.chart})"


def check_homomorphism(A: GAction) -> Certificate:
    L = A.algebra
    items = {}
    for i, j in itertools.combinations(range(L.dim), 2):
        lhs = A.fundamentals[i].bracket(A.fundamentals[j])
        items[f"({i},{j})"] = lhs - A.zeta(L.structure[i][j])
    return exact_certificate("homomorphism", items)


@dataclass
class PointData:
    action: GAction
    point: tuple
    zeta_matrix: list
    rank: int
    isotropy: Subalgebra


def analyze_point(A: GAction, x: Sequence) -> PointData:
    point = tuple(Fraction(v) for v in x)
    if not A.chart.point_allowed(point):
        raise ValueError(f"point {point} lies on the excluded locus")
    Z = A.zeta_matrix_at(point)
    rank = linalg.rank(Z)
    kernel = linalg.nullspace(Z, A.algebra.dim)
    return PointData(A, point, Z, rank, Subalgebra(A.algebra, kernel))


def isotropy_at(A: GAction, x: Sequence) -> Subalgebra:
    return analyze_point(A, x).isotropy


def symbolic_kernel(A: GAction) -> list[list[Fraction]]:
    """Constant X with zeta(X) = 0 identically, from monomial coefficients."""
    rows = []
    for a in range(A.chart.nvars):
        comps = [f.components[a] for f in A.fundamentals]
        den = comps[0].den
        for c in comps[1:]:
            den = den.lcm(c.den)
        nums = [c.num * den.exquo(c.den) for c in comps]
        monomials = sorted({m for p in nums for m in p.keys()})
        for mono in monomials:
            rows.append([Fraction(p.get(mono, 0)) for p in nums])
    rows = [r for r in rows if any(r)]
    return linalg.nullspace(rows, A.algebra.dim)


def classify(A: GAction, sample: Sequence[Sequence]) -> dict:
    if not sample:
        raise ValueError("classify needs a nonempty sample")
    data = [analyze_point(A, x) for x in sample]
    n, m = A.algebra.dim, A.chart.nvars
    flags = {
        "effective": not symbolic_kernel(A),
        "free_on_sample": all(p.rank == n for p in data),
        "transitive_on_sample": all(p.rank == m for p in data),
        "constant_rank_on_sample": len({p.rank for p in data}) == 1,
    }
    if n == m:
        det = linalg.rank(A.zeta_matrix()) == n
        flags["symbolic_free_transitive"] = det
    return flags


def zeta_of_form(A: GAction, phi: Form) -> Form:
    """zeta_phi = sum_i phi^i (x) zeta(e_i)."""
    if phi.kind.kind != "vector" or phi.kind.dim != A.algebra.dim:
        raise ValueError("zeta_of_form needs a g-valued form")
    if phi.kind.algebra is not None and phi.kind.algebra != A.algebra:
        raise ValueError("Lie algebra mismatch")
    return phi.map_values(A.zeta_matrix(), tangent_kind(A.chart))


def is_horizontal(A: GAction, psi: Form) -> Certificate:
    items = {}
    if psi.degree > 0:
        for i, f in enumerate(A.fundamentals):
            items[A.algebra.basis_names[i]] = interior_product(f, psi)
    return exact_certificate("horizontal", items)


def _default_rho(A: GAction, psi: Form):
    if psi.kind.kind == "vector" and psi.kind.algebra is not None:
        return ad_representation(A.algebra)
    return None


def is_equivariant(A: GAction, psi: Form, rho=None) -> Certificate:
    """Residuals L_{zeta_i} psi + rho(e_i) o psi (rho = ad for g-valued forms, trivial otherwise)."""
    if rho is None:
        rho = _default_rho(A, psi)
    items = {}
    for i, f in enumerate(A.fundamentals):
        res = lie_derivative(f, psi)
        if rho is not None and psi.kind.kind != "tangent":
            res = res + psi.map_values(rho[i], psi.kind)
        items[A.algebra.basis_names[i]] = res
    return exact_certificate("equivariant", items)


def is_basic(A: GAction, psi: Form, rho=None) -> Certificate:
    h = is_horizontal(A, psi)
    e = is_equivariant(A, psi, rho)
    items = {f"horizontal {k}": v for k, v in h.items.items()}
    items.update({f"equivariant {k}": v for k, v in e.items.items()})
    return exact_certificate("basic", items)


def check_zeta_identities(A: GAction, phi: Form, psi: Form, omega: Form | None = None) -> Certificate:
    """The four identities relating zeta_(.) with the Froelicher-Nijenhuis bracket."""
    from .connection import ConnectionForm, verify_connection_form

    pre = [is_basic(A, phi), is_basic(A, psi)]
    pre[0].name, pre[1].name = "phi basic", "psi basic"
    zphi, zpsi = zeta_of_form(A, phi), zeta_of_form(A, psi)
    items = {}
    for i, f in enumerate(A.fundamentals):
        b = A.algebra.basis_names[i]
        items[f"(1) [zeta_{b}, zeta_psi]"] = fn_bracket(Form.from_vector_field(f), zpsi)
    items["(2) [zeta_phi, zeta_psi] + zeta_[phi,psi]"] = fn_bracket(zphi, zpsi) + zeta_of_form(A, alg_bracket(phi, psi))
    if omega is not None:
        from .calculus import exterior_derivative

        cert = verify_connection_form(ConnectionForm(A, omega))
        cert.name = "omega connection form"
        pre.append(cert)
        Phi = zeta_of_form(A, omega)
        items["(3) [Phi, zeta_psi] + zeta_(d psi + [omega, psi])"] = fn_bracket(Phi, zpsi) + zeta_of_form(
            A, exterior_derivative(psi) + alg_bracket(omega, psi)
        )
        half = A.chart.const(Fraction(1, 2))
        Omega = exterior_derivative(omega) + alg_bracket(omega, omega).scale(half)
        items["(4) 1/2 [Phi, Phi] + zeta_Omega"] = fn_bracket(Phi, Phi).scale(half) + zeta_of_form(A, Omega)
    cert = exact_certificate("zeta identities", items)
    cert.preconditions = pre
    if not all(pre):
        cert.passed = False
        cert.failures.extend(p.name for p in pre if not p)
    return cert


def verify_dual_action(A: GAction, Ahat: GAction) -> Certificate:
    if A.chart != Ahat.chart or A.algebra != Ahat.algebra:
        raise ValueError("dual action must share chart and algebra")
    L = A.algebra
    items = {}
    for i, j in itertools.product(range(L.dim), repeat=2):
        items[f"centralizer ({i},{j})"] = Ahat.fundamentals[i].bracket(A.fundamentals[j])
    for i, j in itertools.combinations(range(L.dim), 2):
        lhs = Ahat.fundamentals[i].bracket(Ahat.fundamentals[j])
        items[f"anti-homomorphism ({i},{j})"] = lhs + Ahat.zeta(L.structure[i][j])
    return exact_certificate("dual action", items)
