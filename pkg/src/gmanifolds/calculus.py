"""Exact calculus of differential forms on a single rational coordinate chart.

A p-form is stored as a map from strictly increasing index tuples I to value
vectors, so that ``terms[I]`` is the form evaluated on ``(d_{i1}, ..., d_{ip})``.
Values are vectors of rational functions: length 1 for scalar forms, m for
forms with values in R^m (optionally a Lie algebra), n for tangent-valued forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import sympy

from .ratfunc import RationalFunction, poly_ring


class ChartMismatch(ValueError):
    pass


class Chart:
    def __init__(self, var_names: Sequence[str], excluded_locus: Sequence = (), name: str = ""):
        self.var_names = tuple(var_names)
        if not self.var_names:
            raise ValueError("a chart needs at least one variable")
        if len(set(self.var_names)) != len(self.var_names):
            raise ValueError(f"chart variable names must be distinct: {self.var_names}")
        excl = []
        for p in excluded_locus:
            rf = p if isinstance(p, RationalFunction) else RationalFunction.parse(str(p), self.var_names)
            if not rf.is_polynomial():
                raise ValueError("excluded locus entries must be polynomials")
            excl.append(rf)
        self.excluded_locus = tuple(excl)
        self.name = name

    @property
    def nvars(self) -> int:
        return len(self.var_names)

    @property
    def ring(self):
        return poly_ring(self.var_names)

    def var(self, i: int | str) -> RationalFunction:
        if isinstance(i, int):
            i = self.var_names[i]
        return RationalFunction.variable(self.var_names, i)

    def const(self, value) -> RationalFunction:
        return RationalFunction.constant(self.var_names, value)

    def zero(self) -> RationalFunction:
        return self.const(0)

    def one(self) -> RationalFunction:
        return self.const(1)

    def parse(self, text: str) -> RationalFunction:
        return RationalFunction.parse(text, self.var_names)

    def coerce(self, value) -> RationalFunction:
        if isinstance(value, RationalFunction):
            if value.names != self.var_names:
                raise ChartMismatch(f"function on {value.names} used on chart {self.var_names}")
            return value
        if isinstance(value, str):
            return self.parse(value)
        return self.const(value)

    def index(self, name: str) -> int:
        return self.var_names.index(name)

    def admissible_denominator(self, f: RationalFunction) -> bool:
        """True when every irreducible factor of the denominator divides an excluded polynomial."""
        if f.den.is_ground:
            return True
        x = sympy.symbols(self.var_names)
        den = f.den.as_expr()
        excluded = [sympy.Poly(e.num.as_expr(), *x) for e in self.excluded_locus]
        for factor, _ in sympy.factor_list(den, *x)[1]:
            fp = sympy.Poly(factor, *x)
            if not any(sympy.rem(e, fp).is_zero for e in excluded):
                return False
        return True

    def point_allowed(self, point: Sequence) -> bool:
        for e in self.excluded_locus:
            if e.evaluate(point) == 0:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, Chart) and self.var_names == other.var_names

    def __hash__(self):
        return hash(self.var_names)

    def __repr__(self):
        return f"Chart({', '.join(self.var_names)})"


def _same_chart(a: Chart, b: Chart):
    if a != b:
        raise ChartMismatch(f"chart mismatch: {a} vs {b}")


class VectorField:
    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Sequence):
        if len(components) != chart.nvars:
            raise ValueError(f"vector field needs {chart.nvars} components")
        self.chart = chart
        self.components = tuple(chart.coerce(c) for c in components)

    @classmethod
    def coordinate(cls, chart: Chart, i: int) -> VectorField:
        return cls(chart, [chart.const(int(j == i)) for j in range(chart.nvars)])

    @classmethod
    def zero(cls, chart: Chart) -> VectorField:
        return cls(chart, [chart.zero()] * chart.nvars)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def apply(self, f: RationalFunction) -> RationalFunction:
        """Directional derivative xi(f)."""
        acc = self.chart.zero()
        for i, c in enumerate(self.components):
            if not c.is_zero():
                df = f.diff(i)
                if not df.is_zero():
                    acc = acc + c * df
        return acc

    def bracket(self, other: VectorField) -> VectorField:
        _same_chart(self.chart, other.chart)
        return VectorField(
            self.chart,
            [self.apply(b) - other.apply(a) for a, b in zip(self.components, other.components)],
        )

    def __add__(self, other: VectorField) -> VectorField:
        _same_chart(self.chart, other.chart)
        return VectorField(self.chart, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: VectorField) -> VectorField:
        _same_chart(self.chart, other.chart)
        return VectorField(self.chart, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> VectorField:
        return VectorField(self.chart, [-a for a in self.components])

    def scale(self, f) -> VectorField:
        f = self.chart.coerce(f)
        return VectorField(self.chart, [f * a for a in self.components])

    __rmul__ = scale

    def evaluate(self, point: Sequence) -> tuple:
        return tuple(c.evaluate(point) for c in self.components)

    def domain_ok(self) -> bool:
        return all(self.chart.admissible_denominator(c) for c in self.components)

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.chart == other.chart and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __str__(self):
        parts = []
        for name, c in zip(self.chart.var_names, self.components):
            if not c.is_zero():
                parts.append(f"({c})*d/d{name}")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


@dataclass(frozen=True)
class ValueKind:
    """What a form takes values in: 'scalar', 'vector' (R^m, maybe a Lie algebra) or 'tangent'."""

    kind: str
    dim: int
    algebra: object = None

    def compatible(self, other: ValueKind) -> bool:
        if self.kind != other.kind or self.dim != other.dim:
            return False
        if self.algebra is not None and other.algebra is not None:
            return self.algebra == other.algebra
        return True

    def labels(self, chart: Chart | None = None) -> list[str]:
        if self.kind == "scalar":
            return [""]
        if self.kind == "tangent":
            return [f"d/d{v}" for v in chart.var_names]
        if self.algebra is not None:
            return list(self.algebra.basis_names)
        return [f"v{i + 1}" for i in range(self.dim)]


SCALAR = ValueKind("scalar", 1)


def vector_kind(m: int, algebra=None) -> ValueKind:
    if algebra is not None and algebra.dim != m:
        raise ValueError("algebra tag dimension must match value dimension")
    return ValueKind("vector", m, algebra)


def algebra_kind(algebra) -> ValueKind:
    return ValueKind("vector", algebra.dim, algebra)


def tangent_kind(chart: Chart) -> ValueKind:
    return ValueKind("tangent", chart.nvars)


def _merge_sign(a: tuple, b: tuple):
    """Sign and sorted union of two disjoint increasing tuples, or (0, None)."""
    if set(a) & set(b):
        return 0, None
    seq = list(a) + list(b)
    # inversions between a and b (each tuple is already sorted)
    inv = sum(1 for i in a for j in b if i > j)
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


class Form:
    """Degree-p form with rational-function coefficients; immutable."""

    __slots__ = ("chart", "degree", "kind", "terms")

    def __init__(self, chart: Chart, degree: int, kind: ValueKind, terms: Mapping[tuple, Sequence] | None = None):
        if degree < 0:
            raise ValueError("form degree must be nonnegative")
        self.chart = chart
        self.degree = degree
        self.kind = kind
        clean = {}
        if terms and degree <= chart.nvars:
            for idx, values in terms.items():
                idx = tuple(idx)
                if len(idx) != degree or any(not 0 <= i < chart.nvars for i in idx):
                    raise ValueError(f"bad index tuple {idx} for a {degree}-form on {chart}")
                if list(idx) != sorted(set(idx)):
                    raise ValueError(f"index tuple {idx} must be strictly increasing")
                if len(values) != kind.dim:
                    raise ValueError(f"value at {idx} has length {len(values)}, expected {kind.dim}")
                vals = tuple(chart.coerce(v) for v in values)
                if not all(v.is_zero() for v in vals):
                    clean[idx] = vals
        self.terms = clean

    # construction -----------------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart, degree: int, kind: ValueKind = SCALAR) -> Form:
        return cls(chart, degree, kind, {})

    @classmethod
    def function(cls, chart: Chart, f, kind: ValueKind = SCALAR) -> Form:
        """Degree-0 form; for non-scalar kinds ``f`` is a value vector."""
        values = [f] if kind.kind == "scalar" else list(f)
        return cls(chart, 0, kind, {(): values})

    @classmethod
    def dx(cls, chart: Chart, i: int | str) -> Form:
        if isinstance(i, str):
            i = chart.index(i)
        return cls(chart, 1, SCALAR, {(i,): [chart.one()]})

    @classmethod
    def one_form(cls, chart: Chart, coeffs: Sequence) -> Form:
        return cls(chart, 1, SCALAR, {(i,): [c] for i, c in enumerate(coeffs)})

    @classmethod
    def from_components(cls, components: Sequence[Form], kind: ValueKind) -> Form:
        """Combine scalar forms of equal degree into a vector- or tangent-valued form."""
        if len(components) != kind.dim:
            raise ValueError("number of components must equal the value dimension")
        chart, degree = components[0].chart, components[0].degree
        zero = chart.zero()
        terms: dict = {}
        for k, comp in enumerate(components):
            if comp.kind.kind != "scalar" or comp.degree != degree:
                raise ValueError("components must be scalar forms of equal degree")
            _same_chart(chart, comp.chart)
            for idx, (v,) in comp.terms.items():
                row = terms.setdefault(idx, [zero] * kind.dim)
                row[k] = v
        return cls(chart, degree, kind, terms)

    @classmethod
    def tensor(cls, scalar: Form, value: Sequence, kind: ValueKind) -> Form:
        """phi (x) v for a scalar form phi and a constant or functional value vector v."""
        chart = scalar.chart
        vals = [chart.coerce(v) for v in value]
        return cls(chart, scalar.degree, kind, {idx: [f * v for v in vals] for idx, (f,) in scalar.terms.items()})

    @classmethod
    def identity(cls, chart: Chart) -> Form:
        """Id_TM as a tangent-valued 1-form."""
        n = chart.nvars
        return cls(chart, 1, tangent_kind(chart), {(j,): [chart.const(int(i == j)) for i in range(n)] for j in range(n)})

    @classmethod
    def from_vector_field(cls, xi: VectorField) -> Form:
        return cls(xi.chart, 0, tangent_kind(xi.chart), {(): xi.components})

    @classmethod
    def from_matrix(cls, chart: Chart, matrix: Sequence[Sequence], kind: ValueKind | None = None) -> Form:
        """1-form whose value on d_j is column j of ``matrix`` (rows index the value space)."""
        kind = kind or tangent_kind(chart)
        return cls(chart, 1, kind, {(j,): [row[j] for row in matrix] for j in range(chart.nvars)})

    # inspection ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def value(self, idx: Sequence[int]) -> tuple:
        """Value on the coordinate fields d_{idx}; handles unsorted and repeated indices."""
        idx = tuple(idx)
        if len(set(idx)) != len(idx):
            return (self.chart.zero(),) * self.kind.dim
        order = sorted(range(len(idx)), key=lambda k: idx[k])
        sign = _perm_sign(order)
        vals = self.terms.get(tuple(sorted(idx)))
        if vals is None:
            return (self.chart.zero(),) * self.kind.dim
        return vals if sign > 0 else tuple(-v for v in vals)

    def component(self, k: int) -> Form:
        return Form(self.chart, self.degree, SCALAR, {idx: [v[k]] for idx, v in self.terms.items()})

    def components(self) -> list[Form]:
        return [self.component(k) for k in range(self.kind.dim)]

    def matrix(self) -> list[list[RationalFunction]]:
        """For 1-forms: matrix with entry [a][j] = value component a on d_j."""
        if self.degree != 1:
            raise ValueError("matrix() needs a 1-form")
        zero = self.chart.zero()
        out = [[zero] * self.chart.nvars for _ in range(self.kind.dim)]
        for (j,), vals in self.terms.items():
            for a, v in enumerate(vals):
                out[a][j] = v
        return out

    def as_vector_field(self) -> VectorField:
        if self.kind.kind != "tangent" or self.degree != 0:
            raise ValueError("only tangent-valued 0-forms are vector fields")
        vals = self.terms.get((), (self.chart.zero(),) * self.chart.nvars)
        return VectorField(self.chart, vals)

    def scalar_function(self) -> RationalFunction:
        if self.degree != 0 or self.kind.kind != "scalar":
            raise ValueError("not a scalar function")
        return self.terms.get((), (self.chart.zero(),))[0]

    def with_kind(self, kind: ValueKind) -> Form:
        if kind.dim != self.kind.dim:
            raise ValueError("value dimension mismatch")
        return Form(self.chart, self.degree, kind, self.terms)

    # linear structure ---------------------------------------------------------
    def _check_compatible(self, other: Form):
        _same_chart(self.chart, other.chart)
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        if not self.kind.compatible(other.kind):
            raise ValueError(f"value kind mismatch: {self.kind} vs {other.kind}")

    def __add__(self, other: Form) -> Form:
        self._check_compatible(other)
        terms = dict(self.terms)
        for idx, vals in other.terms.items():
            if idx in terms:
                terms[idx] = tuple(a + b for a, b in zip(terms[idx], vals))
            else:
                terms[idx] = vals
        return Form(self.chart, self.degree, self.kind if self.kind.algebra is not None else other.kind, terms)

    def __neg__(self) -> Form:
        return Form(self.chart, self.degree, self.kind, {i: tuple(-v for v in vals) for i, vals in self.terms.items()})

    def __sub__(self, other: Form) -> Form:
        return self + (-other)

    def scale(self, f) -> Form:
        f = self.chart.coerce(f)
        if f.is_zero():
            return Form.zero(self.chart, self.degree, self.kind)
        return Form(self.chart, self.degree, self.kind, {i: tuple(f * v for v in vals) for i, vals in self.terms.items()})

    def __mul__(self, f) -> Form:
        return self.scale(f)

    __rmul__ = __mul__

    def map_values(self, matrix: Sequence[Sequence], kind: ValueKind) -> Form:
        """Apply a (constant or functional) linear map to the values: new[a] = sum_b M[a][b] old[b]."""
        mat = [[self.chart.coerce(v) for v in row] for row in matrix]
        if mat and len(mat[0]) != self.kind.dim:
            raise ValueError("matrix width must equal the value dimension")
        zero = self.chart.zero()
        terms = {}
        for idx, vals in self.terms.items():
            out = []
            for row in mat:
                acc = zero
                for m, v in zip(row, vals):
                    if not m.is_zero() and not v.is_zero():
                        acc = acc + m * v
                out.append(acc)
            terms[idx] = out
        return Form(self.chart, self.degree, kind, terms)

    def __eq__(self, other):
        return (
            isinstance(other, Form)
            and self.chart == other.chart
            and self.degree == other.degree
            and self.kind.kind == other.kind.kind
            and self.kind.dim == other.kind.dim
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.terms.items()))))

    # printing -----------------------------------------------------------------
    def monomial(self, idx: tuple) -> str:
        if not idx:
            return "1"
        return "^".join("d" + self.chart.var_names[i] for i in idx)

    def to_literal(self) -> dict:
        """Serializable mapping {value label: {wedge monomial: expression}}."""
        labels = self.kind.labels(self.chart)
        out: dict = {}
        for idx in sorted(self.terms):
            for label, v in zip(labels, self.terms[idx]):
                if not v.is_zero():
                    out.setdefault(label, {})[self.monomial(idx)] = str(v)
        if self.kind.kind == "scalar":
            return out.get("", {})
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        labels = self.kind.labels(self.chart)
        parts = []
        for idx in sorted(self.terms):
            for label, v in zip(labels, self.terms[idx]):
                if v.is_zero():
                    continue
                mono = self.monomial(idx)
                head = f"({v})" + ("" if mono == "1" else "*" + mono)
                parts.append(head + (f"*{label}" if label else ""))
        return " + ".join(parts)

    def __repr__(self):
        return f"Form(degree={self.degree}, kind={self.kind.kind}, {self})"


def _perm_sign(order: Sequence[int]) -> int:
    sign = 1
    seen = list(order)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


# products ---------------------------------------------------------------------


def wedge_general(a: Form, b: Form, combine: Callable[[tuple, tuple], Sequence], kind: ValueKind) -> Form:
    """Wedge product whose values combine through a bilinear map ``combine``."""
    _same_chart(a.chart, b.chart)
    degree = a.degree + b.degree
    if degree > a.chart.nvars:
        return Form.zero(a.chart, degree, kind)
    terms: dict = {}
    for I, va in a.terms.items():
        for J, vb in b.terms.items():
            sign, K = _merge_sign(I, J)
            if not sign:
                continue
            vals = combine(va, vb)
            if sign < 0:
                vals = [-v for v in vals]
            if K in terms:
                terms[K] = [x + y for x, y in zip(terms[K], vals)]
            else:
                terms[K] = list(vals)
    return Form(a.chart, degree, kind, terms)


def wedge(alpha: Form, beta: Form) -> Form:
    """alpha ^ beta where at least one factor is scalar-valued."""
    if alpha.kind.kind == "scalar":
        return wedge_general(alpha, beta, lambda u, v: [u[0] * x for x in v], beta.kind)
    if beta.kind.kind == "scalar":
        return wedge_general(alpha, beta, lambda u, v: [x * v[0] for x in u], alpha.kind)
    raise ValueError("wedge needs a scalar factor; use tensor_wedge or alg_bracket")


def exterior_derivative(psi: Form) -> Form:
    if psi.kind.kind == "tangent":
        raise ValueError("exterior derivative of tangent-valued forms is not defined")
    chart = psi.chart
    degree = psi.degree + 1
    if degree > chart.nvars:
        return Form.zero(chart, degree, psi.kind)
    terms: dict = {}
    for I, vals in psi.terms.items():
        for j in range(chart.nvars):
            if j in I:
                continue
            sign, K = _merge_sign((j,), I)
            dvals = [v.diff(j) for v in vals]
            if all(d.is_zero() for d in dvals):
                continue
            if sign < 0:
                dvals = [-d for d in dvals]
            if K in terms:
                terms[K] = [x + y for x, y in zip(terms[K], dvals)]
            else:
                terms[K] = dvals
    return Form(chart, degree, psi.kind, terms)


d = exterior_derivative


def interior_product(xi: VectorField, psi: Form) -> Form:
    """i_xi psi, inserting xi into the first slot."""
    _same_chart(xi.chart, psi.chart)
    if psi.degree == 0:
        raise ValueError("interior product of a 0-form")
    terms: dict = {}
    for I, vals in psi.terms.items():
        for r, i in enumerate(I):
            c = xi.components[i]
            if c.is_zero():
                continue
            K = I[:r] + I[r + 1 :]
            factor = c if r % 2 == 0 else -c
            contrib = [factor * v for v in vals]
            if K in terms:
                terms[K] = [x + y for x, y in zip(terms[K], contrib)]
            else:
                terms[K] = contrib
    return Form(psi.chart, psi.degree - 1, psi.kind, terms)


def contract(psi: Form, fields: Sequence[VectorField]) -> tuple:
    """psi(X_1, ..., X_p) as a value vector of rational functions."""
    if len(fields) != psi.degree:
        raise ValueError(f"a {psi.degree}-form needs {psi.degree} arguments")
    cur = psi
    for X in fields:
        cur = interior_product(X, cur)
    return cur.terms.get((), (psi.chart.zero(),) * psi.kind.dim)


def lie_derivative(xi: VectorField, obj):
    if isinstance(obj, VectorField):
        return xi.bracket(obj)
    if obj.kind.kind == "tangent":
        from .brackets import fn_bracket

        return fn_bracket(Form.from_vector_field(xi), obj)
    out = interior_product(xi, exterior_derivative(obj)) if obj.degree < obj.chart.nvars else Form.zero(obj.chart, obj.degree, obj.kind)
    if obj.degree > 0:
        out = out + exterior_derivative(interior_product(xi, obj))
    return out


def linear_pullback(psi: Form, matrix: Sequence[Sequence]) -> Form:
    """Precompose each argument with the endomorphism ``matrix`` of TM (e.g. chi* psi).

    The value space is untouched, so this applies to every value kind.
    """
    chart = psi.chart
    n = chart.nvars
    rows = [Form(chart, 1, SCALAR, {(j,): [matrix[i][j]] for j in range(n)}) for i in range(n)]
    out = Form.zero(chart, psi.degree, psi.kind)
    for I, vals in psi.terms.items():
        acc = Form(chart, 0, SCALAR, {(): [chart.one()]})
        for i in I:
            acc = wedge(acc, rows[i])
        out = out + Form.tensor(acc, vals, psi.kind)
    return out


def pullback(mapping: Sequence[RationalFunction], psi: Form, source: Chart) -> Form:
    """F* psi for F: source -> psi.chart given by target coordinates as functions on ``source``."""
    if psi.kind.kind == "tangent":
        raise ValueError("pullback of tangent-valued forms is not supported")
    target = psi.chart
    if len(mapping) != target.nvars:
        raise ValueError(f"map needs {target.nvars} components")
    mapping = [source.coerce(m) for m in mapping]
    dF = [exterior_derivative(Form.function(source, m)) for m in mapping]
    kind = psi.kind
    out = Form.zero(source, psi.degree, kind)
    for I, vals in psi.terms.items():
        acc = Form.function(source, source.one())
        for i in I:
            acc = wedge(acc, dF[i])
            if acc.is_zero():
                break
        if acc.is_zero():
            continue
        out = out + Form.tensor(acc, [v.compose(mapping) for v in vals], kind)
    return out


def evaluate(obj, point: Sequence):
    """Numeric value at a point: exact for rational points, float otherwise.

    Vector fields give a component tuple.  A p-form gives its value for p = 0,
    a tuple over coordinate directions for p = 1, and a dict over increasing
    index tuples for p >= 2; each value is a number (scalar forms) or a tuple.
    """
    if isinstance(obj, VectorField):
        return obj.evaluate(point)
    scalar = obj.kind.kind == "scalar"

    def val(vals):
        out = tuple(v.evaluate(point) for v in vals)
        return out[0] if scalar else out

    zero_val = val((obj.chart.zero(),) * obj.kind.dim)
    if obj.degree == 0:
        return val(obj.terms[()]) if () in obj.terms else zero_val
    if obj.degree == 1:
        return tuple(val(obj.terms[(j,)]) if (j,) in obj.terms else zero_val for j in range(obj.chart.nvars))
    return {I: val(v) for I, v in sorted(obj.terms.items())}


def all_index_tuples(n: int, p: int) -> Iterable[tuple]:
    return itertools.combinations(range(n), p)


def rational_sample(chart: Chart, count: int, seed: int = 0, avoid: Iterable[RationalFunction] = ()) -> list[tuple]:
    """Deterministic small rational points off the excluded locus and off the denominators in ``avoid``."""
    import random

    rng = random.Random(seed)
    avoid = list(avoid)
    points: list[tuple] = []
    while len(points) < count:
        pt = tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(chart.nvars))
        if not chart.point_allowed(pt):
            continue
        try:
            for f in avoid:
                f.evaluate(pt)
        except ZeroDivisionError:
            continue
        points.append(pt)
    return points


def parse_monomial(chart: Chart, text: str) -> tuple[int, tuple]:
    """'dx^dy' -> (sign, sorted indices); '1' -> (1, ())."""
    text = text.strip()
    if text == "1":
        return 1, ()
    idx = []
    for part in text.split("^"):
        part = part.strip()
        if not part.startswith("d") or part[1:] not in chart.var_names:
            raise ValueError(f"bad wedge monomial {text!r}: {part!r} is not d<variable>")
        idx.append(chart.index(part[1:]))
    if len(set(idx)) != len(idx):
        return 0, ()
    order = sorted(range(len(idx)), key=lambda k: idx[k])
    return _perm_sign(order), tuple(sorted(idx))


def form_from_literal(chart: Chart, literal: Mapping, kind: ValueKind = SCALAR, degree: int | None = None) -> Form:
    """Inverse of ``Form.to_literal``; expressions may be strings or numbers.

    ``degree`` is needed only for an empty literal, or to enforce a degree.
    """
    expected = degree
    labels = kind.labels(chart)
    blocks = {"": literal} if kind.kind == "scalar" else literal
    degree = None
    terms: dict = {}
    zero = chart.zero()
    for label, monos in blocks.items():
        if label not in labels:
            raise ValueError(f"unknown value label {label!r}; expected one of {labels}")
        k = labels.index(label)
        for mono, expr in monos.items():
            sign, idx = parse_monomial(chart, str(mono))
            if degree is None:
                degree = len(str(mono).split("^")) if str(mono).strip() != "1" else 0
            elif (len(str(mono).split("^")) if str(mono).strip() != "1" else 0) != degree:
                raise ValueError(f"monomial {mono!r} has a different degree than the rest of the form")
            if not sign:
                continue
            value = chart.coerce(str(expr) if not isinstance(expr, RationalFunction) else expr)
            row = terms.setdefault(idx, [zero] * kind.dim)
            row[k] = row[k] + (value if sign > 0 else -value)
    if expected is not None and degree is not None and degree != expected:
        raise ValueError(f"form has degree {degree}, expected {expected}")
    return Form(chart, expected if degree is None and expected is not None else degree or 0, kind, terms)
