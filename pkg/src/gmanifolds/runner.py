"""Execution of scenario checks and report assembly."""

from __future__ import annotations

import json
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import action as act
from . import brackets, chernweil, connection as conn, homogeneous as hom, lie, transport
from .calculus import Form, VectorField
from .certificate import Certificate, exact_certificate, numeric_certificate
from .randomforms import random_decomposable, random_heis3_basic, random_transz_basic

PASS, FAIL, ERROR, BLOCKED = "pass", "fail", "error", "blocked"


@dataclass
class Outcome:
    passed: bool
    exact: bool
    residual: str
    outputs: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


@dataclass
class Entry:
    id: str
    check: str
    status: str
    exact: bool | None
    residual: str
    outputs: dict
    notes: list
    seconds: float | None = None

    def as_dict(self, timings: bool) -> dict:
        d = {
            "id": self.id, "check": self.check, "status": self.status, "exact": self.exact,
            "residual": self.residual, "outputs": self.outputs, "notes": self.notes,
        }
        if timings:
            d["seconds"] = round(self.seconds or 0.0, 4)
        return d


@dataclass
class Report:
    scenario: str
    seed: int
    entries: list[Entry]
    timings: bool = False

    @property
    def passed(self) -> bool:
        return all(e.status == PASS for e in self.entries)

    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, ERROR: 0, BLOCKED: 0}
        for e in self.entries:
            out[e.status] += 1
        return out

    def structured(self) -> str:
        body = {
            "scenario": self.scenario, "seed": self.seed, "passed": self.passed, "counts": self.counts(),
            "checks": [e.as_dict(self.timings) for e in self.entries],
        }
        return json.dumps(body, indent=2, sort_keys=True) + "\n"

    def text(self) -> str:
        lines = [f"scenario {self.scenario} (seed {self.seed})"]
        for e in self.entries:
            kind = "" if e.exact is None else (" exact" if e.exact else " numeric")
            t = f" [{e.seconds:.3f}s]" if self.timings and e.seconds is not None else ""
            lines.append(f"{e.status.upper():8} {e.id} ({e.check}{kind}): {e.residual}{t}")
            for k in sorted(e.outputs):
                lines.append(f"         {k} = {_output_text(e.outputs[k])}")
            for n in e.notes:
                lines.append(f"         note: {n}")
        c = self.counts()
        lines.append(f"{c[PASS]} passed, {c[FAIL]} failed, {c[ERROR]} errors, {c[BLOCKED]} blocked")
        return "\n".join(lines) + "\n"


def _output_text(value) -> str:
    if isinstance(value, dict) and "literal" in value:
        return value.get("text", json.dumps(value["literal"], sort_keys=True))
    return json.dumps(value, sort_keys=True)


def serialize_form(form: Form) -> dict:
    return {"degree": form.degree, "kind": form.kind.kind, "literal": form.to_literal(), "text": str(form)}


# context -------------------------------------------------------------------------------------


class Context:
    def __init__(self, scenario, check, tol: float | None):
        self.scenario = scenario
        self.check = check
        self.tol_override = tol
        self.settings = scenario.settings
        self.rng = random.Random(f"{scenario.seed}:{check.id}")

    def p(self, key, default=None, required=False):
        if key not in self.check.params:
            if required:
                raise ValueError(f"check {self.check.id!r} needs parameter {key!r}")
            return default
        return self.check.params[key]

    def ref(self, key, section, required=True):
        name = self.p(key, required=required)
        return None if name is None else self.scenario.get(name, section)

    def tol(self, default: float) -> float:
        if "tol" in self.check.params:
            return float(self.check.params["tol"])
        return self.tol_override if self.tol_override is not None else default

    def vec(self, key, required=True):
        v = self.p(key, required=required)
        return None if v is None else [Fraction(str(c)) for c in v]

    def point(self, key, required=True):
        return self.vec(key, required)


def _from_cert(cert: Certificate, outputs=None, expect_pass=True) -> Outcome:
    if cert.exact:
        residual = "zero" if cert.passed else "nonzero: " + ", ".join(cert.failures[:6])
    else:
        worst = max((float(v) for v in cert.items.values()), default=0.0)
        tol = next((n for n in cert.notes if n.startswith("tolerance")), "")
        residual = f"max error {worst:.3e} ({tol})" if tol else f"max error {worst:.3e}"
        if not cert.passed:
            residual += " failing: " + ", ".join(cert.failures[:6])
    pre_fail = [p.name for p in cert.preconditions if not p]
    notes = [n for n in cert.notes if not n.startswith("tolerance")]
    if pre_fail:
        notes.append("precondition failed: " + ", ".join(pre_fail))
    return Outcome(cert.passed == expect_pass, cert.exact, residual, outputs or {}, notes)


def _expect_pass(ctx) -> bool:
    e = ctx.p("expect", "pass")
    if e not in ("pass", "fail"):
        raise ValueError("expect must be 'pass' or 'fail'")
    return e == "pass"


# checks ----------------------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckDef:
    fn: Callable
    refs: dict
    validates: str | None = None  # parameter naming the validated declaration


CHECKS: dict[str, CheckDef] = {}


def check(name, refs=None, validates=None):
    def deco(fn):
        CHECKS[name] = CheckDef(fn, refs or {}, validates)
        return fn

    return deco


@check("jacobi", {"algebra": "algebras"}, validates="algebra")
def _jacobi(ctx):
    return _from_cert(lie.check_jacobi(ctx.ref("algebra", "algebras")), expect_pass=_expect_pass(ctx))


@check("representation", {"algebra": "algebras"}, validates="algebra")
def _representation(ctx):
    return _from_cert(lie.check_representation(ctx.ref("algebra", "algebras")), expect_pass=_expect_pass(ctx))


@check("homomorphism", {"action": "actions"}, validates="action")
def _homomorphism(ctx):
    return _from_cert(act.check_homomorphism(ctx.ref("action", "actions")), expect_pass=_expect_pass(ctx))


@check("connection_form", {"connection": "connections"}, validates="connection")
def _connection_form(ctx):
    return _from_cert(conn.verify_connection_form(ctx.ref("connection", "connections")), expect_pass=_expect_pass(ctx))


@check("group", {"group": "groups"}, validates="group")
def _group(ctx):
    return _from_cert(ctx.ref("group", "groups").verify(), expect_pass=_expect_pass(ctx))


@check("classify", {"action": "actions"})
def _classify(ctx):
    A = ctx.ref("action", "actions")
    pts = [[Fraction(str(v)) for v in p] for p in ctx.p("points", required=True)]
    flags = act.classify(A, pts)
    expect = ctx.p("expect", {}) or {}
    unknown = set(expect) - set(flags)
    if unknown:
        raise ValueError(f"unknown classification flags {sorted(unknown)}")
    bad = [k for k, v in expect.items() if flags[k] != bool(v)]
    residual = "flags match" if not bad else "mismatch: " + ", ".join(sorted(bad))
    return Outcome(not bad, True, residual, {"flags": dict(sorted(flags.items()))})


@check("isotropy", {"action": "actions"})
def _isotropy(ctx):
    A = ctx.ref("action", "actions")
    iso = act.isotropy_at(A, ctx.point("point"))
    expect = ctx.p("dim")
    ok = expect is None or iso.dim == int(expect)
    out = {"dim": iso.dim, "basis": [[str(c) for c in v] for v in iso.basis]}
    return Outcome(ok, True, f"isotropy dimension {iso.dim}", out)


@check("dual_action", {"action": "actions", "dual": "actions"})
def _dual(ctx):
    cert = act.verify_dual_action(ctx.ref("action", "actions"), ctx.ref("dual", "actions"))
    return _from_cert(cert, expect_pass=_expect_pass(ctx))


@check("fn_bracket_oracle", {"chart": "charts"})
def _fn_oracle(ctx):
    chart = ctx.ref("chart", "charts")
    n = int(ctx.p("pairs", 100))
    deg = int(ctx.p("max_form_degree", 2))
    cdeg = int(ctx.p("max_coeff_degree", 2))
    items = {}
    for k in range(n):
        K = random_decomposable(chart, ctx.rng.randint(0, deg), ctx.rng, cdeg)
        L = random_decomposable(chart, ctx.rng.randint(0, deg), ctx.rng, cdeg)
        items[f"pair {k}"] = brackets.fn_bracket(K, L) - brackets.fn_bracket_via_global(K, L)
    return _from_cert(exact_certificate("fn bracket oracle", items), {"pairs": n})


@check("zeta_identities", {"action": "actions", "phi": "forms", "psi": "forms", "omega": "forms"})
def _zeta_identities(ctx):
    A = ctx.ref("action", "actions")
    omega = ctx.ref("omega", "forms", required=False)
    cert = act.check_zeta_identities(A, ctx.ref("phi", "forms"), ctx.ref("psi", "forms"), omega)
    return _from_cert(cert, expect_pass=_expect_pass(ctx))


@check("zeta_identities_random", {"action": "actions"})
def _zeta_identities_random(ctx):
    """Item (2) on random basic pairs; family 'transz' or 'heis3'."""
    A = ctx.ref("action", "actions")
    family = ctx.p("family", required=True)
    n = int(ctx.p("pairs", 20))
    items = {}
    for k in range(n):
        if family == "transz":
            from .calculus import algebra_kind

            kind = algebra_kind(A.algebra)
            phi = random_transz_basic(A, ctx.rng.randint(0, 1), ctx.rng, kind)
            psi = random_transz_basic(A, ctx.rng.randint(0, 1), ctx.rng, kind)
        elif family == "heis3":
            phi, psi = random_heis3_basic(A, ctx.rng), random_heis3_basic(A, ctx.rng)
        else:
            raise ValueError(f"unknown family {family!r}")
        cert = act.check_zeta_identities(A, phi, psi)
        if not all(cert.preconditions):
            raise AssertionError("random generator produced a non-basic form")
        key = "(2) [zeta_phi, zeta_psi] + zeta_[phi,psi]"
        items[f"pair {k}"] = cert.items[key]
    return _from_cert(exact_certificate("zeta identities item (2), random basic pairs", items), {"pairs": n})


def _connection_pair(ctx):
    wc = ctx.ref("connection", "connections")
    return wc, conn.connection_from_form(wc)


@check("connection", {"connection": "connections"})
def _connection(ctx):
    wc, C = _connection_pair(ctx)
    return _from_cert(conn.verify_connection(C, seed=ctx.scenario.seed), {"Phi": serialize_form(C.phi)})


@check("curvature", {"connection": "connections"})
def _curvature(ctx):
    wc, C = _connection_pair(ctx)
    try:
        R = conn.curvature(C)
        Omega = conn.curvature_form(wc)
    except conn.CurvatureRouteMismatch as exc:
        return Outcome(False, True, f"nonzero: {exc}")
    items = {"R - (-zeta_Omega)": R + act.zeta_of_form(wc.action, Omega)}
    if "expect_Omega" in ctx.check.params:
        from .calculus import form_from_literal

        want = form_from_literal(wc.action.chart, ctx.p("expect_Omega"), Omega.kind, 2)
        items["Omega - expected"] = Omega - want
    cert = exact_certificate("curvature", items)
    return _from_cert(cert, {"R": serialize_form(R), "Omega": serialize_form(Omega)})


@check("bianchi", {"connection": "connections"})
def _bianchi(ctx):
    wc = ctx.ref("connection", "connections")
    return _from_cert(conn.bianchi(wc=wc))


@check("covariant_identities", {"connection": "connections", "psis": "forms"})
def _covariant_identities(ctx):
    wc, C = _connection_pair(ctx)
    psis = [ctx.scenario.get(n, "forms") for n in ctx.p("psis", [])]
    return _from_cert(conn.check_covariant_identities(C, wc, psis))


@check("basic_identities", {"connection": "connections", "psi": "forms", "Psi": "forms"})
def _basic_identities(ctx):
    wc, C = _connection_pair(ctx)
    cert = conn.check_basic_identities(C, wc, ctx.ref("psi", "forms", False), ctx.ref("Psi", "forms", False))
    return _from_cert(cert, expect_pass=_expect_pass(ctx))


@check("maurer_cartan", {"action": "actions"})
def _maurer_cartan(ctx):
    A = ctx.ref("action", "actions")
    kappa = hom.maurer_cartan_from_action(A)
    items = {"d kappa + 1/2 [kappa, kappa]": hom.mc_residual(kappa)}
    if "expect" in ctx.check.params:
        from .calculus import form_from_literal

        want = form_from_literal(A.chart, ctx.p("expect"), kappa.kind, 1)
        items["kappa - expected"] = kappa - want
    inv = hom.inverse_action(kappa)
    items.update({f"inverse homomorphism {k}": v for k, v in act.check_homomorphism(inv).items.items()})
    return _from_cert(exact_certificate("maurer-cartan", items), {"kappa": serialize_form(kappa)})


@check("reductive", {"action": "actions"})
def _reductive(ctx):
    A = ctx.ref("action", "actions")
    x0 = ctx.point("point")
    expect = ctx.p("expect", "found")
    iso = act.isotropy_at(A, x0)
    D = hom.find_reductive_complement(A.algebra, iso, tuple(x0))
    if D is None:
        return Outcome(expect == "none", True, "no reductive complement", {"complement": None})
    out = {"complement": [[str(c) for c in v] for v in D.m]}
    cert = D.verify()
    if not cert:
        return _from_cert(cert, out)
    wc = hom.connection_form_from_reductive(A, D)
    items = dict(conn.verify_connection_form(wc).items)
    if "expect_omega" in ctx.check.params:
        from .calculus import form_from_literal

        items["omega - expected"] = wc.omega - form_from_literal(A.chart, ctx.p("expect_omega"), wc.omega.kind, 1)
    o = _from_cert(exact_certificate("reductive connection form", items), dict(out, omega=serialize_form(wc.omega)))
    o.passed = o.passed and expect == "found"
    return o


@check("asystatic", {"action": "actions"})
def _asystatic(ctx):
    A = ctx.ref("action", "actions")
    value = conn.is_asystatic(A, ctx.point("point"))
    expect = ctx.p("expect")
    ok = expect is None or value == bool(expect)
    return Outcome(ok, True, f"asystatic = {str(value).lower()}", {"asystatic": value})


@check("lift", {"group": "groups", "connection": "connections"})
def _lift(ctx):
    Gc = ctx.ref("group", "groups")
    wc = ctx.ref("connection", "connections")
    h = lie.Subalgebra(Gc.algebra, [[Fraction(str(c)) for c in v] for v in ctx.p("subalgebra", required=True)])
    proj = [str(e) for e in ctx.p("projection", required=True)]
    samples = [([Fraction(str(c)) for c in s["X"]], Fraction(str(s["t"]))) for s in ctx.p("samples", [])]
    rep = hom.lift_connection(Gc, h, wc, proj, samples)
    return _from_cert(rep.certificate, {"omega_tilde": serialize_form(rep.omega_tilde)})


@check("invariance", {"polynomial": "polynomials", "algebra": "algebras"})
def _invariance(ctx):
    f = ctx.ref("polynomial", "polynomials")
    return _from_cert(lie.check_invariance(f, ctx.ref("algebra", "algebras")), expect_pass=_expect_pass(ctx))


@check("chern_weil", {"polynomial": "polynomials", "connection": "connections"})
def _chern_weil(ctx):
    f = ctx.ref("polynomial", "polynomials")
    wc = ctx.ref("connection", "connections")
    cert = chernweil.chern_weil_certificate(f, wc)
    cw = chernweil.chern_weil_form(f, wc)
    items = dict(cert.items)
    if "expect" in ctx.check.params:
        from .calculus import form_from_literal

        items["f^Omega - expected"] = cw - form_from_literal(wc.action.chart, ctx.p("expect"), cw.kind, cw.degree)
    return _from_cert(exact_certificate("chern-weil", items), {"f_Omega": serialize_form(cw)})


@check("transgression", {"polynomial": "polynomials", "connection0": "connections", "connection1": "connections"})
def _transgression(ctx):
    rep = chernweil.transgression(
        ctx.ref("polynomial", "polynomials"), ctx.ref("connection0", "connections"), ctx.ref("connection1", "connections")
    )
    out = {"difference": serialize_form(rep.difference), "primitive": serialize_form(rep.primitive)}
    return _from_cert(rep.certificate(), out)


@check("basic_complex", {"action": "actions", "form": "forms"})
def _basic_complex(ctx):
    cert = chernweil.basic_complex_check(ctx.ref("action", "actions"), ctx.ref("form", "forms"))
    return _from_cert(cert, expect_pass=_expect_pass(ctx))


@check("ad_via_flow", {"action": "actions"})
def _ad_via_flow(ctx):
    A = ctx.ref("action", "actions")
    probes = [[float(Fraction(str(v))) for v in p] for p in ctx.p("probes", required=True)]
    t = Fraction(str(ctx.p("t", 1)))
    exact_map = ctx.p("exact_inverse_flow")
    cert = transport.ad_via_flow(
        A, ctx.vec("X"), t, ctx.vec("Y"), probes, ctx.settings, tol=ctx.tol(1e-5),
        exact_inverse_flow=[str(e) for e in exact_map] if exact_map else None,
    )
    return _from_cert(cert)


@check("develop", {"action": "actions", "group": "groups", "curves": "curves"})
def _develop(ctx):
    A = ctx.ref("action", "actions")
    Gc = ctx.ref("group", "groups")
    names = ctx.p("curves", required=True)
    ends = [transport.cartan_develop(A, Gc, ctx.scenario.get(n, "curves"), ctx.settings) for n in names]
    errors = {}
    for n, e in zip(names[1:], ends[1:]):
        errors[f"{names[0]} vs {n}"] = max(abs(a - b) for a, b in zip(ends[0], e))
    if "expect" in ctx.check.params:
        want = [float(Fraction(str(v))) for v in ctx.p("expect")]
        errors["endpoint vs expected"] = max(abs(a - b) for a, b in zip(ends[0], want))
    cert = numeric_certificate("developing path independence", errors, ctx.tol(1e-6))
    return _from_cert(cert, {"endpoint": [_fmt(v) for v in ends[0]]})


@check("parallel_transport", {"bundle": "bundles", "curve": "curves"})
def _parallel_transport(ctx):
    B = ctx.ref("bundle", "bundles")
    c = ctx.ref("curve", "curves")
    u0 = [float(v) for v in ctx.vec("u0")]
    end = transport.parallel_transport(B, c, u0, ctx.settings)
    errors = {}
    if "expect" in ctx.check.params:
        want = [float(Fraction(str(v))) for v in ctx.p("expect")]
        errors["endpoint"] = max(abs(a - b) for a, b in zip(end, want))
    if "reparametrize" in ctx.check.params:
        other = transport.parallel_transport(B, c.reparametrize(str(ctx.p("reparametrize"))), u0, ctx.settings)
        errors["reparametrization"] = max(abs(a - b) for a, b in zip(end, other))
    return _from_cert(numeric_certificate("parallel transport", errors, ctx.tol(1e-7)), {"endpoint": [_fmt(v) for v in end]})


@check("zeta_related", {"bundle": "bundles", "curve": "curves"})
def _zeta_related(ctx):
    B = ctx.ref("bundle", "bundles")
    c = ctx.ref("curve", "curves")
    X = ctx.vec("X", required=False) or [Fraction(int(i == 0)) for i in range(B.fiber_action.algebra.dim)]
    defect = transport.pt_tangent_defect(B, c, [float(v) for v in ctx.vec("u0")], X, ctx.settings)
    return _from_cert(numeric_certificate("zeta-relatedness of transport", {"defect": defect}, ctx.tol(1e-6)))


@check("holonomy", {"bundle": "bundles", "loop": "curves"})
def _holonomy(ctx):
    B = ctx.ref("bundle", "bundles")
    loop = ctx.ref("loop", "curves")
    u0 = [float(v) for v in ctx.vec("u0")]
    disp = transport.holonomy_loop(B, loop, u0, ctx.settings)
    quad = transport.line_integral(B, loop, u0)
    errors = {}
    if "magnitude" in ctx.check.params:
        mag = math.sqrt(sum(v * v for v in disp))
        errors["magnitude"] = abs(mag - float(Fraction(str(ctx.p("magnitude")))))
    if ctx.p("quadrature_sign", True):
        # orientation oracle: componentwise sign agreement with the line integral of Gamma
        errors["sign vs quadrature"] = float(sum(1 for a, b in zip(disp, quad) if abs(b) > 1e-12 and (a > 0) != (b > 0)))
    cert = numeric_certificate("holonomy", errors, ctx.tol(1e-6))
    return _from_cert(cert, {"displacement": [_fmt(v) for v in disp], "quadrature": [_fmt(v) for v in quad]})


@check("holonomy_curvature", {"bundle": "bundles"})
def _holonomy_curvature(ctx):
    B = ctx.ref("bundle", "bundles")
    hs = [float(Fraction(str(h))) for h in ctx.p("hs", [0.2, 0.1, 0.05])]
    fibers = [[float(Fraction(str(v))) for v in u] for u in ctx.p("fibers", [[0]])]
    rep = transport.holonomy_curvature_check(B, ctx.point("point"), hs, fibers, ctx.settings)
    min_order = float(ctx.p("min_order", 1.9))
    order = rep.min_order()
    ok = order >= min_order
    residual = rep.summary()
    out = {"errors": [_fmt(e) for e in rep.errors]}
    if not rep.at_roundoff:
        out["orders"] = [_fmt(o) for o in rep.orders]
    return Outcome(ok, False, residual, out, [] if ok else [f"order below {min_order}"])


@check("horizontal_lift", {"bundle": "bundles"})
def _horizontal_lift(ctx):
    B = ctx.ref("bundle", "bundles")
    C = conn.christoffel_connection(B)
    comps = ctx.p("field", required=True)
    base = B.base_chart
    vals = [base.zero()] * base.nvars
    for k, v in comps.items():
        var = str(k)[3:] if str(k).startswith("d/d") else str(k)
        vals[base.index(var)] = base.coerce(str(v))
    xi = VectorField(base, vals)
    cert = conn.check_horizontal_lift(C, B, xi)
    lift = conn.horizontal_lift(C, B, xi)
    return _from_cert(cert, {"lift": str(lift)})


def _fmt(v: float) -> str:
    return f"{v:.12g}"


# validation of check specs and execution -------------------------------------------------------


def _referenced(scenario, spec) -> list[str]:
    d = CHECKS[spec.kind]
    names = []
    for key, section in d.refs.items():
        if key not in spec.params:
            continue
        vals = spec.params[key]
        vals = vals if isinstance(vals, list) else [vals]
        for v in vals:
            if not isinstance(v, str) or v not in scenario.declarations or scenario.declarations[v].section != section:
                from .scenario import ScenarioError

                raise ScenarioError(f"check {spec.id!r}: unresolved reference {v!r} for {key!r} (expected a {section[:-1]})", spec.line)
            names.append(v)
    return names


def validate_checks(scenario):
    from .scenario import ScenarioError

    for spec in scenario.checks:
        if spec.kind not in CHECKS:
            raise ScenarioError(f"unknown check type {spec.kind!r}", spec.line)
        _referenced(scenario, spec)


def _execute(scenario, spec, tol) -> Entry:
    start = time.perf_counter()
    ctx = Context(scenario, spec, tol)
    try:
        o = CHECKS[spec.kind].fn(ctx)
        entry = Entry(spec.id, spec.kind, PASS if o.passed else FAIL, o.exact, o.residual, o.outputs, o.notes)
    except Exception as exc:  # a failing check must not abort the run
        entry = Entry(spec.id, spec.kind, ERROR, None, f"{type(exc).__name__}: {exc}", {}, [])
    entry.seconds = time.perf_counter() - start
    return entry


def run(scenario, jobs: int = 1, tol: float | None = None, timings: bool = False) -> Report:
    """Validation checks run first, in order; dependent checks of a failed validation are blocked."""
    results: dict[str, Entry] = {}
    failed: set[str] = set()
    deps = {s.id: scenario.closure(_referenced(scenario, s)) for s in scenario.checks}

    def blocked_by(spec) -> list[str]:
        return sorted(deps[spec.id] & failed)

    def blocked_entry(spec, names) -> Entry:
        return Entry(spec.id, spec.kind, BLOCKED, None, "blocked by failed validation of " + ", ".join(names), {}, [], 0.0)

    for spec in scenario.checks:
        d = CHECKS[spec.kind]
        if d.validates is None:
            continue
        names = blocked_by(spec)
        if names:
            results[spec.id] = blocked_entry(spec, names)
            failed.add(spec.params[d.validates])
            continue
        entry = _execute(scenario, spec, tol)
        results[spec.id] = entry
        if entry.status != PASS:
            failed.add(spec.params[d.validates])
    rest = [s for s in scenario.checks if s.id not in results]
    runnable = []
    for spec in rest:
        names = blocked_by(spec)
        if names:
            results[spec.id] = blocked_entry(spec, names)
        else:
            runnable.append(spec)
    if jobs > 1 and len(runnable) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for spec, entry in zip(runnable, pool.map(lambda s: _execute(scenario, s, tol), runnable)):
                results[spec.id] = entry
    else:
        for spec in runnable:
            results[spec.id] = _execute(scenario, spec, tol)
    return Report(scenario.name, scenario.seed, [results[s.id] for s in scenario.checks], timings)

