"""Scenario files: YAML declarations of algebras, charts, actions, forms, bundles and curves plus checks.

Everything is built and validated at parse time; errors carry the line of the
offending entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import yaml

from . import fixtures
from .action import GAction
from .calculus import SCALAR, Chart, VectorField, algebra_kind, form_from_literal, tangent_kind
from .connection import ConnectionForm, LocalBundle
from .homogeneous import MatrixGroupChart
from .lie import InvariantPolynomial, LieAlgebra, killing_form, trace_polynomial
from .ratfunc import ExpressionError
from .transport import CurveSpec, OdeSettings

SECTIONS = ("algebras", "charts", "actions", "forms", "connections", "bundles", "groups", "curves", "polynomials")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


# YAML with line numbers -------------------------------------------------------------------


class LineDict(dict):
    line: int | None = None
    key_lines: dict


class LineList(list):
    line: int | None = None


class _Loader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    out = LineDict()
    out.line = node.start_mark.line + 1
    out.key_lines = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        if key in out:
            raise ScenarioError(f"duplicate key {key!r}", key_node.start_mark.line + 1)
        out[key] = loader.construct_object(value_node, deep=True)
        out.key_lines[key] = key_node.start_mark.line + 1
    return out


def _construct_sequence(loader, node):
    out = LineList(loader.construct_object(child, deep=True) for child in node.value)
    out.line = node.start_mark.line + 1
    return out


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)
_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_SEQUENCE_TAG, _construct_sequence)


def _line(obj, key=None):
    if key is not None and isinstance(obj, LineDict):
        return obj.key_lines.get(key, obj.line)
    return getattr(obj, "line", None)


# scenario objects --------------------------------------------------------------------------


@dataclass
class Declaration:
    section: str
    name: str
    value: Any
    deps: tuple[str, ...]
    line: int | None
    spec: Any = None


@dataclass
class CheckSpec:
    id: str
    kind: str
    params: dict
    line: int | None


@dataclass
class Scenario:
    name: str
    declarations: dict[str, Declaration]
    checks: list[CheckSpec]
    settings: OdeSettings
    seed: int = 0
    tol: float | None = None
    source: str = ""

    def get(self, name: str, section: str | None = None):
        d = self.declarations.get(name)
        if d is None or (section and d.section != section):
            raise KeyError(name)
        return d.value

    def closure(self, names) -> set[str]:
        seen: set[str] = set()
        stack = list(names)
        while stack:
            n = stack.pop()
            if n in seen or n not in self.declarations:
                continue
            seen.add(n)
            stack.extend(self.declarations[n].deps)
        return seen


# builders -----------------------------------------------------------------------------------


class _Builder:
    def __init__(self):
        self.decls: dict[str, Declaration] = {}

    def ref(self, name, section: str, line) -> Declaration:
        d = self.decls.get(name) if isinstance(name, str) else None
        if d is None or d.section != section:
            raise ScenarioError(f"unresolved reference {name!r} (expected a declared {section[:-1]})", line)
        return d

    def add(self, section, name, value, deps, line, spec=None):
        if name in self.decls:
            raise ScenarioError(f"name {name!r} declared twice", line)
        self.decls[name] = Declaration(section, name, value, tuple(deps), line, spec)

    # algebras
    def algebra(self, name, spec, line):
        if "builtin" in spec:
            table = {"heis3": fixtures.heis3_algebra, "sl2": fixtures.sl2_algebra, "aff1": fixtures.aff1_algebra, "line": fixtures.line_algebra}
            if spec["builtin"] not in table:
                raise ScenarioError(f"unknown builtin algebra {spec['builtin']!r}", line)
            return table[spec["builtin"]](), ()
        basis = [str(b) for b in _need(spec, "basis", line)]
        rep = None
        if "rep" in spec:
            rep = [_need(spec["rep"], b, _line(spec, "rep")) for b in basis]
        if "structure" in spec:
            table = spec["structure"]
            try:
                structure = [[[Fraction(str(c)) for c in row] for row in plane] for plane in table]
            except (TypeError, ValueError) as exc:
                raise ScenarioError(f"bad structure table: {exc}", _line(spec, "structure")) from None
            return LieAlgebra(basis, structure, matrix_rep=rep, name=name), ()
        brackets = {}
        for key, value in (spec.get("brackets") or {}).items():
            parts = [p.strip() for p in str(key).strip("[]").split(",")]
            if len(parts) != 2 or any(p not in basis for p in parts):
                raise ScenarioError(f"bad bracket key {key!r}", _line(spec["brackets"], key))
            i, j = basis.index(parts[0]), basis.index(parts[1])
            out = {}
            for label, c in value.items():
                if label not in basis:
                    raise ScenarioError(f"unknown basis element {label!r}", _line(spec["brackets"], key))
                out[basis.index(label)] = Fraction(str(c))
            brackets[(i, j)] = out
        return LieAlgebra.from_brackets(basis, brackets, matrix_rep=rep, name=name), ()

    def chart(self, name, spec, line):
        vars_ = [str(v) for v in _need(spec, "vars", line)]
        return Chart(vars_, [str(e) for e in spec.get("excluded", [])], name=name), ()

    def action(self, name, spec, line):
        if "builtin" in spec:
            table = {
                "HEIS3": fixtures.heis3, "HEIS3_dual": fixtures.heis3_dual, "SL2R": fixtures.sl2r, "AFF1": fixtures.aff1,
                "ROT2": fixtures.rot2, "TRANSZ": fixtures.transz, "HEIS_coset": fixtures.heis_coset,
            }
            if spec["builtin"] not in table:
                raise ScenarioError(f"unknown builtin action {spec['builtin']!r}", line)
            return table[spec["builtin"]](), ()
        alg = self.ref(_need(spec, "algebra", line), "algebras", line)
        ch = self.ref(_need(spec, "chart", line), "charts", line)
        L, chart = alg.value, ch.value
        fields_spec = _need(spec, "fields", line)
        fields = []
        for b in L.basis_names:
            comps = fields_spec.get(b, {}) or {}
            fields.append(_vector_field(chart, comps, _line(fields_spec, b)))
        extra = set(fields_spec) - set(L.basis_names)
        if extra:
            raise ScenarioError(f"fields for unknown basis elements {sorted(extra)}", _line(spec, "fields"))
        return GAction(L, chart, fields, name=name), (alg.name, ch.name)

    def form(self, name, spec, line):
        chart, kind, deps = self._form_target(spec, line)
        literal = _need(spec, "literal", line)
        try:
            return form_from_literal(chart, literal, kind, spec.get("degree")), deps
        except ExpressionError as exc:
            raise ScenarioError(str(exc), _line(spec, "literal")) from None
        except ValueError as exc:
            raise ScenarioError(f"malformed form: {exc}", _line(spec, "literal")) from None

    def _form_target(self, spec, line):
        values = spec.get("values", "algebra" if "action" in spec or "algebra" in spec else "scalar")
        deps = []
        if "action" in spec:
            act = self.ref(spec["action"], "actions", line)
            deps.append(act.name)
            chart, L = act.value.chart, act.value.algebra
        else:
            ch = self.ref(_need(spec, "chart", line), "charts", line)
            deps.append(ch.name)
            chart = ch.value
            L = None
            if "algebra" in spec:
                alg = self.ref(spec["algebra"], "algebras", line)
                deps.append(alg.name)
                L = alg.value
        if values == "scalar":
            kind = SCALAR
        elif values == "tangent":
            kind = tangent_kind(chart)
        elif values == "algebra":
            if L is None:
                raise ScenarioError("algebra-valued form needs an action or algebra", line)
            kind = algebra_kind(L)
        else:
            raise ScenarioError(f"unknown value kind {values!r}", line)
        return chart, kind, deps

    def connection(self, name, spec, line):
        if "builtin" in spec:
            table = {"TRANSZ": fixtures.transz_omega, "ROT2": fixtures.rot2_omega, "HEIS3": fixtures.heis3_omega, "AFF1": fixtures.aff1_omega}
            if spec["builtin"] not in table:
                raise ScenarioError(f"unknown builtin connection {spec['builtin']!r}", line)
            return table[spec["builtin"]](), ()
        act = self.ref(_need(spec, "action", line), "actions", line)
        if "form" in spec:
            f = self.ref(spec["form"], "forms", line)
            return ConnectionForm(act.value, f.value), (act.name, f.name)
        omega, deps = self.form(name, dict(spec, values="algebra"), line)
        return ConnectionForm(act.value, omega), (act.name,)

    def bundle(self, name, spec, line):
        if spec.get("builtin") == "BUND1":
            return fixtures.bund1(), ()
        base = Chart([str(v) for v in _need(spec, "base", line)])
        chris = _need(spec, "christoffel", line)
        if "fiber_action" in spec:
            fa = self.ref(spec["fiber_action"], "actions", line)
            comps = {str(k): [str(c) for c in v] for k, v in chris.items()}
            deps = (fa.name,)
            fiber = fa.value
        else:
            fiber = fixtures.line_fiber(str(spec.get("fiber_var", "s")))
            comps = {str(k): [str(v)] for k, v in chris.items()}
            deps = ()
        unknown = set(comps) - set(base.var_names)
        if unknown:
            raise ScenarioError(f"christoffel components for unknown base variables {sorted(unknown)}", _line(spec, "christoffel"))
        try:
            return LocalBundle(base, fiber, comps, name=name), deps
        except ExpressionError as exc:
            raise ScenarioError(str(exc), _line(spec, "christoffel")) from None

    def group(self, name, spec, line):
        if spec.get("builtin") == "heisenberg":
            return fixtures.heisenberg_group(), ()
        alg = self.ref(_need(spec, "algebra", line), "algebras", line)
        chart = Chart([str(v) for v in _need(spec, "vars", line)])
        matrix = [[str(c) for c in row] for row in _need(spec, "matrix", line)]
        inverse = [[str(c) for c in row] for row in _need(spec, "inverse", line)]
        ident = [Fraction(str(v)) for v in _need(spec, "identity", line)]
        entries = [tuple(e) for e in spec["entries"]] if "entries" in spec else None
        return MatrixGroupChart(alg.value, chart, matrix, inverse, ident, entry_coords=entries), (alg.name,)

    def curve(self, name, spec, line):
        if "polyline" in spec:
            return CurveSpec.polyline([[Fraction(str(v)) for v in p] for p in spec["polyline"]]), ()
        if "square" in spec:
            sq = spec["square"]
            return CurveSpec.square([Fraction(str(v)) for v in sq["corner"]], Fraction(str(sq["side"]))), ()
        pieces = []
        for p in _need(spec, "pieces", line):
            exprs = [str(e) for e in _need(p, "exprs", _line(p))]
            pieces.append((Fraction(str(p.get("from", 0))), Fraction(str(p.get("to", 1))), exprs))
        return CurveSpec(len(pieces[0][2]), pieces), ()

    def polynomial(self, name, spec, line):
        alg = self.ref(_need(spec, "algebra", line), "algebras", line)
        L = alg.value
        if spec.get("killing"):
            return killing_form(L), (alg.name,)
        if "trace" in spec:
            return trace_polynomial(L, int(spec["trace"])), (alg.name,)
        if "linear" in spec:
            cov = spec["linear"]
            if isinstance(cov, dict):
                cov = [cov.get(b, 0) for b in L.basis_names]
            return InvariantPolynomial.linear([Fraction(str(c)) for c in cov]), (alg.name,)
        degree = int(_need(spec, "degree", line))
        coeffs = {}
        for key, c in (spec.get("coeffs") or {}).items():
            labels = [p.strip() for p in str(key).split(",")]
            if any(lab not in L.basis_names for lab in labels):
                raise ScenarioError(f"bad coefficient key {key!r}", _line(spec["coeffs"], key))
            coeffs[tuple(L.basis_names.index(lab) for lab in labels)] = Fraction(str(c))
        return InvariantPolynomial(degree, L.dim, coeffs), (alg.name,)


def _need(spec, key, line):
    if not isinstance(spec, dict) or key not in spec:
        raise ScenarioError(f"missing required key {key!r}", line)
    return spec[key]


def _vector_field(chart: Chart, comps: dict, line) -> VectorField:
    values = [chart.zero()] * chart.nvars
    for key, expr in comps.items():
        var = str(key)[3:] if str(key).startswith("d/d") else str(key)
        if var not in chart.var_names:
            raise ScenarioError(f"unknown coordinate {key!r}", line)
        try:
            values[chart.index(var)] = chart.coerce(str(expr))
        except ExpressionError as exc:
            raise ScenarioError(str(exc), line) from None
    return VectorField(chart, values)


_BUILDERS = {
    "algebras": "algebra", "charts": "chart", "actions": "action", "forms": "form", "connections": "connection",
    "bundles": "bundle", "groups": "group", "curves": "curve", "polynomials": "polynomial",
}


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    """Parse and fully validate a scenario; raises ScenarioError with a line number."""
    try:
        data = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"syntax error: {getattr(exc, 'problem', exc)}", mark.line + 1 if mark else None) from None
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a mapping")
    unknown = set(data) - set(SECTIONS) - {"settings", "checks", "name"}
    if unknown:
        key = sorted(unknown)[0]
        raise ScenarioError(f"unknown section {key!r}", _line(data, key))
    b = _Builder()
    for section in SECTIONS:
        entries = data.get(section) or {}
        if not isinstance(entries, dict):
            raise ScenarioError(f"section {section!r} must be a mapping", _line(data, section))
        for dname, spec in entries.items():
            line = _line(entries, dname)
            if not isinstance(spec, dict):
                raise ScenarioError(f"declaration {dname!r} must be a mapping", line)
            try:
                value, deps = getattr(b, _BUILDERS[section])(str(dname), spec, line)
            except ScenarioError:
                raise
            except (ExpressionError, ValueError, TypeError, ZeroDivisionError) as exc:
                raise ScenarioError(f"{section[:-1]} {dname!r}: {exc}", line) from None
            b.add(section, str(dname), value, deps, line, spec)
    settings = data.get("settings") or {}
    ode = OdeSettings(int(settings.get("ode_steps", 1000)), bool(settings.get("richardson", True)))
    checks = []
    seen = set()
    for n, entry in enumerate(data.get("checks") or []):
        line = _line(entry)
        if not isinstance(entry, dict) or "check" not in entry:
            raise ScenarioError("each check needs a 'check' key", line)
        cid = str(entry.get("id", f"{entry['check']}-{n + 1}"))
        if cid in seen:
            raise ScenarioError(f"duplicate check id {cid!r}", line)
        seen.add(cid)
        params = {k: v for k, v in entry.items() if k not in ("check", "id")}
        checks.append(CheckSpec(cid, str(entry["check"]), params, line))
    tol = settings.get("tol")
    scen = Scenario(
        str(data.get("name", name)), b.decls, checks, ode, int(settings.get("seed", 0)),
        float(tol) if tol is not None else None, text,
    )
    from .runner import validate_checks

    validate_checks(scen)
    return scen
