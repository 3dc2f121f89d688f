"""Chern-Weil forms, the basic complex, and the exact transgression between two connections."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .action import GAction, is_basic, is_equivariant, is_horizontal
from .brackets import alg_bracket, tensor_wedge
from .calculus import SCALAR, Form, exterior_derivative
from .certificate import Certificate, exact_certificate
from .connection import ConnectionForm, _symbolic_free, curvature_form, verify_connection_form
from .lie import InvariantPolynomial, check_invariance

__all__ = [
    "NonInvariantPolynomial",
    "apply_invariant",
    "chern_weil_form",
    "chern_weil_certificate",
    "TransgressionReport",
    "transgression",
    "basic_complex_check",
]


class NonInvariantPolynomial(ValueError):
    def __init__(self, cert: Certificate):
        super().__init__(f"polynomial is not ad-invariant: {cert.summary()}")
        self.certificate = cert


def apply_invariant(f: InvariantPolynomial, *psis: Form) -> Form:
    """f(psi_1, ..., psi_k): the wedge-tensor product of the forms contracted with f."""
    if len(psis) != f.degree:
        raise ValueError(f"expected {f.degree} forms, got {len(psis)}")
    chart = psis[0].chart
    for psi in psis:
        if psi.kind.kind != "vector" or psi.kind.dim != f.dim:
            raise ValueError(f"forms must take values in a {f.dim}-dimensional algebra")
        if psi.chart != chart:
            raise ValueError("forms must share a chart")
    algebras = {psi.kind.algebra for psi in psis} - {None}
    if len(algebras) > 1:
        raise ValueError("forms take values in different Lie algebras")
    prod = psis[0]
    for psi in psis[1:]:
        prod = tensor_wedge(prod, psi)
    row = [f.coefficient(idx) for idx in itertools.product(range(f.dim), repeat=f.degree)]
    return prod.map_values([row], SCALAR)


def _require_invariant(f: InvariantPolynomial, wc: ConnectionForm):
    cert = check_invariance(f, wc.action.algebra)
    if not cert:
        raise NonInvariantPolynomial(cert)


def chern_weil_form(f: InvariantPolynomial, wc: ConnectionForm) -> Form:
    """f^Omega; raises if f is not invariant and asserts the result is closed."""
    _require_invariant(f, wc)
    cert = verify_connection_form(wc)
    if not cert:
        raise ValueError(f"invalid connection form: {cert.summary()}")
    Omega = curvature_form(wc)
    out = apply_invariant(f, *([Omega] * f.degree))
    if not exterior_derivative(out).is_zero():
        raise AssertionError("Chern-Weil form is not closed")
    return out


def chern_weil_certificate(f: InvariantPolynomial, wc: ConnectionForm) -> Certificate:
    """Closedness, invariance, and horizontality when the action is free."""
    A = wc.action
    cw = chern_weil_form(f, wc)
    items = {"closed": exterior_derivative(cw)}
    for k, v in is_equivariant(A, cw).items.items():
        items[f"invariant {k}"] = v
    if _symbolic_free(A):
        for k, v in is_horizontal(A, cw).items.items():
            items[f"horizontal {k}"] = v
    cert = exact_certificate("chern-weil", items)
    cert.notes.append(f"f^Omega = {cw}")
    return cert


@dataclass
class TransgressionReport:
    f: InvariantPolynomial
    omega0: ConnectionForm
    omega1: ConnectionForm
    difference: Form
    primitive: Form
    residual: Form

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()

    def certificate(self) -> Certificate:
        return exact_certificate("transgression", {"difference - d(primitive)": self.residual})


def transgression(f: InvariantPolynomial, wc0: ConnectionForm, wc1: ConnectionForm) -> TransgressionReport:
    """Exact primitive k int_0^1 f(beta, Omega_t, ..., Omega_t) dt along omega_t = omega0 + t beta."""
    if wc0.action is not wc1.action and (wc0.action.chart != wc1.action.chart or wc0.action.algebra != wc1.action.algebra):
        raise ValueError("transgression needs two connection forms on the same action")
    _require_invariant(f, wc0)
    for wc in (wc0, wc1):
        cert = verify_connection_form(wc)
        if not cert:
            raise ValueError(f"invalid connection form: {cert.summary()}")
    A = wc0.action
    beta = wc1.omega - wc0.omega
    hor = is_horizontal(A, beta)
    if not hor:
        raise AssertionError(f"omega1 - omega0 is not horizontal: {hor.summary()}")
    chart = A.chart
    half = chart.const(Fraction(1, 2))
    Omega0 = curvature_form(wc0)
    # Omega_t = sum_j t^j coeffs[j]
    coeffs = [
        Omega0,
        exterior_derivative(beta) + alg_bracket(wc0.omega, beta),
        alg_bracket(beta, beta).scale(half),
    ]
    k = f.degree
    primitive = Form.zero(chart, 2 * k - 1)
    for choice in itertools.product(range(3), repeat=k - 1):
        term = apply_invariant(f, beta, *(coeffs[j] for j in choice))
        if term.is_zero():
            continue
        weight = Fraction(k, sum(choice) + 1)
        primitive = primitive + term.scale(chart.const(weight))
    difference = apply_invariant(f, *([curvature_form(wc1)] * k)) - apply_invariant(f, *([Omega0] * k))
    residual = difference - exterior_derivative(primitive)
    return TransgressionReport(f, wc0, wc1, difference, primitive, residual)


def basic_complex_check(A: GAction, psi: Form) -> Certificate:
    """If psi is basic then d psi is basic; a non-basic psi fails as a precondition."""
    pre = is_basic(A, psi)
    pre.name = "psi basic"
    dpsi = exterior_derivative(psi)
    cert = is_basic(A, dpsi)
    cert.name = "basic complex"
    cert.preconditions = [pre]
    if not pre:
        cert.passed = False
        cert.failures.insert(0, "psi basic (precondition)")
    return cert
