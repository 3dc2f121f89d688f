"""Maurer-Cartan forms, reductive decompositions and matrix-group lifts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from . import linalg
from .action import GAction, analyze_point
from .brackets import alg_bracket
from .calculus import (
    Chart,
    Form,
    VectorField,
    algebra_kind,
    exterior_derivative,
    interior_product,
    lie_derivative,
    pullback,
    vector_kind,
)
from .certificate import Certificate, exact_certificate
from .connection import ConnectionForm, curvature_form, verify_connection_form
from .lie import LieAlgebra, Subalgebra, ad_matrix, bracket
from .ratfunc import RationalFunction


class SingularActionError(ValueError):
    """The zeta-matrix is not invertible over the rational-function field."""


class NoReductiveComplement(ValueError):
    pass


class NoConnectionForm(ValueError):
    pass


def maurer_cartan_from_action(A: GAction) -> Form:
    """kappa = zeta^{-1} for a free transitive action."""
    n, m = A.algebra.dim, A.chart.nvars
    if n != m:
        raise SingularActionError(f"zeta-matrix is {m}x{n}; a free transitive action needs a square matrix")
    inv = linalg.inverse(A.zeta_matrix(), A.chart.one())
    if inv is None:
        raise SingularActionError("zeta-matrix is singular")
    return Form.from_matrix(A.chart, inv, algebra_kind(A.algebra))


def mc_residual(kappa: Form) -> Form:
    half = kappa.chart.const(Fraction(1, 2))
    return exterior_derivative(kappa) + alg_bracket(kappa, kappa).scale(half)


def inverse_action(kappa: Form, name: str = "") -> GAction:
    """The fields zeta(e_i) = kappa^{-1}(e_i) of a pointwise invertible g-valued 1-form."""
    L = kappa.kind.algebra
    inv = linalg.inverse(kappa.matrix(), kappa.chart.one())
    if inv is None:
        raise SingularActionError("kappa is not pointwise invertible")
    n = kappa.chart.nvars
    fields = [VectorField(kappa.chart, [inv[a][i] for a in range(n)]) for i in range(L.dim)]
    return GAction(L, kappa.chart, fields, name=name)


# reductive decompositions ------------------------------------------------------------


@dataclass
class ReductiveDecomposition:
    h: Subalgebra
    m: list  # basis vectors of the complement (a linear subspace, need not be a subalgebra)
    base_point: tuple | None = None

    def verify(self) -> Certificate:
        L = self.h.parent
        rows = list(self.h.basis) + [list(v) for v in self.m]
        items = {"direct sum defect": Fraction(L.dim - linalg.rank(rows)) if rows else Fraction(L.dim)}
        items["dimension defect"] = Fraction(L.dim - self.h.dim - len(self.m))
        span_m = [list(v) for v in self.m]
        for i, a in itertools.product(range(self.h.dim), range(len(self.m))):
            w = bracket(L, self.h.basis[i], self.m[a])
            inside = (linalg.rank(span_m + [list(w)]) == len(span_m)) if span_m else not any(w)
            items[f"[h{i}, m{a}] in m"] = Fraction(0 if inside else 1)
        return exact_certificate("reductive decomposition", items)


def find_reductive_complement(L: LieAlgebra, h: Subalgebra, base_point=None) -> ReductiveDecomposition | None:
    """Search m = graph of A: c -> h over the standard complement c; None if no rational A exists."""
    r = h.dim
    comp = h.complement_indices()
    q = len(comp)
    if q == 0:
        return ReductiveDecomposition(h, [], base_point)
    syms = sympy.symbols(f"a0:{q * r}") if r else ()
    A = [[syms[a * r + b] for b in range(r)] for a in range(q)]
    hb = [[sympy.Rational(v.numerator, v.denominator) for v in b] for b in h.basis]

    def mvec(a):
        v = [sympy.Integer(int(k == comp[a])) for k in range(L.dim)]
        for b in range(r):
            v = [x + A[a][b] * y for x, y in zip(v, hb[b])]
        return v

    ms = [mvec(a) for a in range(q)]
    # coordinates with respect to (h basis, standard complement)
    basis_cols = sympy.Matrix([list(b) for b in hb] + [[int(k == c) for k in range(L.dim)] for c in comp]).T
    basis_inv = basis_cols.inv()
    eqs = []
    for i in range(r):
        for a in range(q):
            w = [sympy.Integer(0)] * L.dim
            for s, t in itertools.product(range(L.dim), repeat=2):
                hs, mt = hb[i][s], ms[a][t]
                if hs == 0 or mt == 0:
                    continue
                for k, c in enumerate(L.structure[s][t]):
                    if c:
                        w[k] += hs * mt * sympy.Rational(c.numerator, c.denominator)
            coords = basis_inv * sympy.Matrix(w)
            hpart, cpart = coords[:r], coords[r:]
            for b in range(r):
                eqs.append(sympy.expand(hpart[b] - sum(cpart[d] * A[d][b] for d in range(q))))
    eqs = [e for e in eqs if e != 0]
    if not eqs:
        solution = {s: 0 for s in syms}
    else:
        sols = sympy.solve(eqs, list(syms), dict=True)
        solution = None
        for sol in sols:
            full = {s: sympy.sympify(sol.get(s, s)) for s in syms}
            free = set().union(*(v.free_symbols for v in full.values())) if full else set()
            full = {s: v.subs({f: 0 for f in free}) for s, v in full.items()}
            if all(v.is_rational for v in full.values()):
                solution = full
                break
        if solution is None:
            return None
    m = []
    for a in range(q):
        v = [sympy.nsimplify(x.subs(solution)) for x in ms[a]]
        m.append(tuple(Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in v))
    D = ReductiveDecomposition(h, m, base_point)
    if not D.verify():
        return None
    return D


# connection forms from reductive data ----------------------------------------------------


def _monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    out = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), total):
            exps = [0] * nvars
            for c in combo:
                exps[c] += 1
            out.append(tuple(exps))
    return out


def _denominator_candidates(A: GAction) -> list[RationalFunction]:
    chart = A.chart
    cands = [chart.one()]
    Z = A.zeta_matrix()
    k = chart.nvars
    for cols in itertools.combinations(range(A.algebra.dim), k):
        sub = [[Z[r][c] for c in cols] for r in range(k)]
        det = _det(sub, chart)
        if not det.is_zero() and not det.is_constant():
            num = RationalFunction(det.num, None)
            if num not in cands:
                cands.append(num)
    return cands


def _det(M, chart: Chart) -> RationalFunction:
    n = len(M)
    if n == 1:
        return M[0][0]
    total = chart.zero()
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = M[0][j] * _det(minor, chart)
        total = total + term if j % 2 == 0 else total - term
    return total


def _rows_from_identities(columns: list[list[RationalFunction]], constants: list[RationalFunction]) -> tuple[list, list]:
    """Each identity sum_t u_t columns[e][t] + constants[e] = 0 becomes rows over Q via monomial coefficients."""
    rows, rhs = [], []
    for col, const in zip(columns, constants):
        funcs = list(col) + [const]
        den = funcs[0].den
        for f in funcs[1:]:
            den = den.lcm(f.den)
        nums = [f.num * den.exquo(f.den) for f in funcs]
        monos = sorted({mono for p in nums for mono in p.keys()})
        for mono in monos:
            row = [Fraction(p.get(mono, 0)) for p in nums[:-1]]
            b = -Fraction(nums[-1].get(mono, 0))
            if any(row) or b:
                rows.append(row)
                rhs.append(b)
    return rows, rhs


def connection_form_from_reductive(A: GAction, D: ReductiveDecomposition, max_degree: int = 4) -> ConnectionForm:
    """Solve for an equivariant omega with zeta omega zeta = zeta and omega_x0 = (zeta_x0|m)^{-1}."""
    chart = A.chart
    L = A.algebra
    x0 = D.base_point if D.base_point is not None else tuple(Fraction(0) for _ in range(chart.nvars))
    pd = analyze_point(A, x0)
    if pd.rank != chart.nvars:
        raise NoConnectionForm("action is not transitive at the base point")
    if pd.isotropy != D.h:
        raise NoConnectionForm("decomposition does not match the isotropy at the base point")
    if not D.verify():
        raise NoConnectionForm("invalid reductive decomposition")
    n, dim = chart.nvars, L.dim
    Z = A.zeta_matrix()
    ad = [ad_matrix(L, L.basis_vector(k)) for k in range(dim)]
    # target values at x0: omega_x0(zeta_x0(m_a)) = m_a
    targets = [([sum((pd.zeta_matrix[r][i] * v[i] for i in range(dim)), Fraction(0)) for r in range(n)], v) for v in D.m]
    for Q in _denominator_candidates(A):
        try:
            qx0 = Q.evaluate(x0)
        except ZeroDivisionError:
            continue
        if qx0 == 0:
            continue
        for degree in range(max_degree + 1):
            monos = _monomials(n, degree)
            ring = chart.ring
            basis = [RationalFunction(ring({m: 1}), Q.num) for m in monos]
            unknowns = [(i, j, b) for i in range(dim) for j in range(n) for b in range(len(basis))]
            columns: list[list] = []
            consts: list = []
            zero = chart.zero()
            # equivariance: L_zeta_k omega + ad(e_k) omega = 0, component (i, j)
            for k, f in enumerate(A.fundamentals):
                dxi = [[f.components[l].diff(j) for l in range(n)] for j in range(n)]
                for i in range(dim):
                    for j in range(n):
                        col = []
                        for (ii, jj, b) in unknowns:
                            g = basis[b]
                            val = zero
                            if ii == i and jj == j:
                                val = val + f.apply(g)
                            if ii == i and not dxi[j][jj].is_zero():
                                val = val + g * dxi[j][jj]
                            if ad[k][i][ii] and jj == j:
                                val = val + g * ad[k][i][ii]
                            col.append(val)
                        columns.append(col)
                        consts.append(zero)
            # zeta omega zeta = zeta, entry (r, c)
            for r in range(n):
                for c in range(dim):
                    col = []
                    for (ii, jj, b) in unknowns:
                        coef = Z[r][ii] * Z[jj][c]
                        col.append(coef * basis[b] if not coef.is_zero() else zero)
                    columns.append(col)
                    consts.append(-Z[r][c])
            rows, rhs = _rows_from_identities(columns, consts)
            # normalization at x0
            for vec_x, m_val in targets:
                for i in range(dim):
                    row = []
                    for (ii, jj, b) in unknowns:
                        row.append(basis[b].evaluate(x0) * vec_x[jj] if ii == i else Fraction(0))
                    rows.append(row)
                    rhs.append(Fraction(m_val[i]))
            sol = linalg.solve(rows, rhs) if rows else [Fraction(0)] * len(unknowns)
            if sol is None:
                continue
            mat = [[zero] * n for _ in range(dim)]
            for value, (i, j, b) in zip(sol, unknowns):
                if value:
                    mat[i][j] = mat[i][j] + basis[b] * value
            omega = Form.from_matrix(chart, mat, algebra_kind(L))
            wc = ConnectionForm(A, omega)
            if verify_connection_form(wc):
                return wc
    raise NoConnectionForm(f"no equivariant extension with numerator degree <= {max_degree} in the rational ansatz")


def connection_form_for(A: GAction, x0: Sequence, max_degree: int = 4) -> ConnectionForm:
    iso = analyze_point(A, x0).isotropy
    D = find_reductive_complement(A.algebra, iso, tuple(Fraction(v) for v in x0))
    if D is None:
        raise NoReductiveComplement("no reductive complement found")
    return connection_form_from_reductive(A, D, max_degree)


# matrix groups ---------------------------------------------------------------------------


class MatrixGroupChart:
    """Rational parametrization u -> g(u) of a matrix group with a supplied rational inverse."""

    def __init__(
        self,
        algebra: LieAlgebra,
        chart: Chart,
        matrix: Sequence[Sequence],
        inverse: Sequence[Sequence],
        identity_coords: Sequence,
        entry_coords: Sequence[tuple[int, int]] | None = None,
    ):
        if algebra.matrix_rep is None:
            raise ValueError("a matrix group chart needs the algebra's matrix representation")
        self.algebra = algebra
        self.chart = chart
        self.g = [[chart.coerce(v) for v in row] for row in matrix]
        self.ginv = [[chart.coerce(v) for v in row] for row in inverse]
        self.identity_coords = tuple(Fraction(v) for v in identity_coords)
        self.entry_coords = tuple(entry_coords) if entry_coords else None
        self.size = len(self.g)
        if len(algebra.matrix_rep[0]) != self.size:
            raise ValueError("group matrices and representation matrices differ in size")

    def verify(self) -> Certificate:
        one, zero = self.chart.one(), self.chart.zero()
        prod = linalg.matmul(self.g, self.ginv)
        ident = [[one if i == j else zero for j in range(self.size)] for i in range(self.size)]
        items = {"g g^-1 - I": [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(prod, ident)]}
        e = [[v.evaluate(self.identity_coords) for v in row] for row in self.g]
        items["g(identity) - I"] = [[e[i][j] - int(i == j) for j in range(self.size)] for i in range(self.size)]
        J = self._jacobian()
        items["jacobian rank defect"] = Fraction(self.chart.nvars - linalg.rank(J))
        return exact_certificate("matrix group chart", items)

    def _jacobian(self) -> list[list]:
        """Rows: matrix entries; columns: chart coordinates."""
        return [[self.g[r][c].diff(k) for k in range(self.chart.nvars)] for r in range(self.size) for c in range(self.size)]

    def _rep(self, X: Sequence) -> list[list]:
        return [[self.chart.const(v) for v in row] for row in self.algebra.rep_matrix(X)]

    def _velocity_field(self, M: list[list]) -> VectorField:
        """Chart field whose induced matrix velocity is M (exact linear solve)."""
        J = self._jacobian()
        rhs = [M[r][c] for r in range(self.size) for c in range(self.size)]
        sol = linalg.solve(J, rhs, self.chart.one())
        if sol is None:
            raise ValueError("matrix velocity is not tangent to the parametrized group")
        return VectorField(self.chart, sol)

    def left_invariant_field(self, X: Sequence) -> VectorField:
        return self._velocity_field(linalg.matmul(self.g, self._rep(X)))

    def right_invariant_field(self, X: Sequence) -> VectorField:
        return self._velocity_field(linalg.matmul(self._rep(X), self.g))

    def left_action(self) -> GAction:
        """The g-action by left-invariant fields (generating right multiplications)."""
        fields = [self.left_invariant_field(self.algebra.basis_vector(i)) for i in range(self.algebra.dim)]
        return GAction(self.algebra, self.chart, fields, name="left-invariant fields")

    def _algebra_coords(self, M: list[list]) -> list:
        """Coordinates of a matrix (entries rational functions) in the representation basis."""
        cols = [[self.chart.const(v) for row in self.algebra.matrix_rep[i] for v in row] for i in range(self.algebra.dim)]
        A = linalg.transpose(cols)
        rhs = [v for row in M for v in row]
        sol = linalg.solve(A, rhs, self.chart.one())
        if sol is None:
            raise ValueError("matrix is not in the image of the representation")
        return sol

    def _matrix_form_to_algebra(self, dM) -> Form:
        """dM[k] is the matrix value on d/du_k; returns the g-valued 1-form."""
        n = self.chart.nvars
        colvals = [self._algebra_coords(dM[k]) for k in range(n)]
        mat = [[colvals[k][i] for k in range(n)] for i in range(self.algebra.dim)]
        return Form.from_matrix(self.chart, mat, algebra_kind(self.algebra))

    def _dg(self) -> list:
        n = self.chart.nvars
        return [[[v.diff(k) for v in row] for row in self.g] for k in range(n)]

    def right_maurer_cartan(self) -> Form:
        """kappa^r(v) = v g^{-1}."""
        return self._matrix_form_to_algebra([linalg.matmul(dg, self.ginv) for dg in self._dg()])

    def left_maurer_cartan(self) -> Form:
        """kappa^l(v) = g^{-1} v."""
        return self._matrix_form_to_algebra([linalg.matmul(self.ginv, dg) for dg in self._dg()])

    def Ad(self) -> list[list]:
        """Matrix of Ad(g) = g (.) g^{-1} in the algebra basis, entries rational functions."""
        cols = []
        for i in range(self.algebra.dim):
            M = linalg.matmul(linalg.matmul(self.g, self._rep(self.algebra.basis_vector(i))), self.ginv)
            cols.append(self._algebra_coords(M))
        return linalg.transpose(cols)

    def coords_of(self, M: Sequence[Sequence]) -> tuple:
        if self.entry_coords is None:
            raise ValueError("no entry coordinates declared for this chart")
        return tuple(M[r][c] for r, c in self.entry_coords)


@dataclass
class LiftReport:
    omega_tilde: Form
    certificate: Certificate


def lift_connection(
    Gc: MatrixGroupChart,
    h: Subalgebra,
    wc: ConnectionForm,
    projection: Sequence,
    samples: Sequence[Sequence] = (),
) -> LiftReport:
    """omega~ = kappa^r - Ad(g) p^* omega, with the curvature relation and h-equivariance certified."""
    chart = Gc.chart
    L = Gc.algebra
    p = [chart.coerce(v) for v in projection]
    pw = pullback(p, wc.omega, chart)
    Ad = Gc.Ad()
    kr = Gc.right_maurer_cartan()
    wt = kr - pw.map_values(Ad, algebra_kind(L))
    items = {}
    ann = h.annihilator()
    if ann:
        items["values in h"] = wt.map_values(ann, vector_kind(len(ann)))
    for i, X in enumerate(h.basis):
        RX = Gc.right_invariant_field(X)
        val = interior_product(RX, wt).terms.get((), (chart.zero(),) * L.dim)
        items[f"omega~(R_X) - X for h{i}"] = [v - chart.const(x) for v, x in zip(val, X)]
        items[f"L_(R_X) omega~ - ad(X) omega~ for h{i}"] = lie_derivative(RX, wt) - wt.map_values(ad_matrix(L, X), wt.kind)
    half = chart.const(Fraction(1, 2))
    Omega = curvature_form(wc, check=False)
    lhs = exterior_derivative(wt) - alg_bracket(wt, wt).scale(half)
    rhs = -pullback(p, Omega, chart).map_values(Ad, algebra_kind(L))
    items["d omega~ - 1/2 [omega~, omega~] + Ad p^* Omega"] = lhs - rhs
    if samples and Gc.entry_coords is not None:
        for k, (X, t) in enumerate(samples):
            if not h.contains(X):
                raise ValueError(f"sample {k}: {list(X)} is not in the subalgebra h")
            items[f"(mu_h)^* omega~ - Ad(h) omega~, sample {k}"] = _finite_equivariance(Gc, wt, X, t)
    return LiftReport(wt, exact_certificate("lifted connection", items))


def _finite_equivariance(Gc: MatrixGroupChart, wt: Form, X: Sequence, t) -> Form:
    """Pull omega~ back along left multiplication by h = exp(tX) (X nilpotent in the representation)."""
    chart = Gc.chart
    Xm = Gc.algebra.rep_matrix([Fraction(t) * Fraction(v) for v in X])
    size = Gc.size
    H = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    term = [row[:] for row in H]
    for k in range(1, size + 1):
        term = [[v / k for v in row] for row in linalg.matmul(term, Xm)]
        H = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(H, term)]
    if any(v for row in term for v in row):
        raise ValueError("finite equivariance check needs a nilpotent representation matrix")
    Hc = [[chart.const(v) for v in row] for row in H]
    moved = linalg.matmul(Hc, Gc.g)
    pulled = pullback(list(Gc.coords_of(moved)), wt, chart)
    # Ad(h) in the algebra basis
    Hinv_cols = []
    Hinv = linalg.inverse(H)
    for i in range(Gc.algebra.dim):
        M = linalg.matmul(linalg.matmul(H, Gc.algebra.rep_matrix(Gc.algebra.basis_vector(i))), Hinv)
        Hinv_cols.append(Gc._algebra_coords([[chart.const(v) for v in row] for row in M]))
    AdH = linalg.transpose(Hinv_cols)
    return pulled - wt.map_values(AdH, wt.kind)
