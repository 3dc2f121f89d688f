"""Finite-dimensional Lie algebras over Q given by structure constants."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from . import linalg
from .certificate import Certificate

Vector = tuple  # tuple[Fraction, ...]


def vec(values: Sequence) -> Vector:
    return tuple(Fraction(v) for v in values)


class LieAlgebra:
    """Structure constants ``c[i][j][k]`` with ``[e_i, e_j] = sum_k c[i][j][k] e_k``.

    Antisymmetry and shapes are enforced on construction.  The Jacobi
    identity and the representation property are certified separately by
    :func:`check_jacobi` and :func:`check_representation`, so that tampered
    tables can still be built and rejected with a witness.
    """

    def __init__(self, basis_names: Sequence[str], structure, matrix_rep=None, name: str = ""):
        self.basis_names = tuple(basis_names)
        self.name = name
        n = len(self.basis_names)
        if n == 0:
            raise ValueError("a Lie algebra needs a nonempty basis")
        if len(set(self.basis_names)) != n:
            raise ValueError("basis names must be distinct")
        table = [[vec(structure[i][j]) for j in range(n)] for i in range(n)]
        for i, j in itertools.product(range(n), repeat=2):
            if len(table[i][j]) != n:
                raise ValueError(f"structure entry ({i},{j}) has wrong length")
        for i, j, k in itertools.product(range(n), repeat=3):
            if table[i][j][k] != -table[j][i][k]:
                raise ValueError(
                    f"structure constants are not antisymmetric at (i,j,k)=({i},{j},{k})"
                )
        self.structure = tuple(tuple(row) for row in table)
        if matrix_rep is not None:
            mats = []
            for m in matrix_rep:
                mats.append(tuple(tuple(Fraction(v) for v in row) for row in m))
            if len(mats) != n:
                raise ValueError("matrix representation needs one matrix per basis element")
            size = len(mats[0])
            if any(len(m) != size or any(len(r) != size for r in m) for m in mats):
                raise ValueError("representation matrices must be square of equal size")
            self.matrix_rep = tuple(mats)
        else:
            self.matrix_rep = None

    @classmethod
    def from_brackets(cls, basis_names, brackets: Mapping[tuple[int, int], Mapping[int, object]], matrix_rep=None, name=""):
        """Build from the nonzero brackets ``{(i, j): {k: coeff}}`` with i < j."""
        n = len(basis_names)
        table = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), value in brackets.items():
            for k, c in value.items():
                table[i][j][k] = Fraction(c)
                table[j][i][k] = -Fraction(c)
        return cls(basis_names, table, matrix_rep, name)

    @classmethod
    def abelian(cls, n: int, name: str = "") -> LieAlgebra:
        names = [f"e{i + 1}" for i in range(n)]
        return cls.from_brackets(names, {}, name=name or f"R{n}")

    @property
    def dim(self) -> int:
        return len(self.basis_names)

    def basis_vector(self, i: int) -> Vector:
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def zero(self) -> Vector:
        return (Fraction(0),) * self.dim

    def is_abelian(self) -> bool:
        return all(c == 0 for row in self.structure for v in row for c in v)

    def rep_matrix(self, X: Sequence) -> list[list[Fraction]]:
        if self.matrix_rep is None:
            raise ValueError(f"Lie algebra {self.name or self.basis_names} has no matrix representation")
        m = len(self.matrix_rep[0])
        out = [[Fraction(0)] * m for _ in range(m)]
        for a, coeff in enumerate(X):
            if coeff:
                for r in range(m):
                    for s in range(m):
                        out[r][s] += coeff * self.matrix_rep[a][r][s]
        return out

    def __eq__(self, other):
        return (
            isinstance(other, LieAlgebra)
            and self.basis_names == other.basis_names
            and self.structure == other.structure
        )

    def __hash__(self):
        return hash((self.basis_names, self.structure))

    def __repr__(self):
        return f"LieAlgebra({self.name or ','.join(self.basis_names)}, dim={self.dim})"


def bracket(L: LieAlgebra, A: Sequence, B: Sequence) -> Vector:
    n = L.dim
    if len(A) != n or len(B) != n:
        raise ValueError(f"expected vectors of length {n}")
    out = [Fraction(0)] * n
    for i, a in enumerate(A):
        if not a:
            continue
        for j, b in enumerate(B):
            if not b:
                continue
            row = L.structure[i][j]
            ab = a * b
            for k in range(n):
                if row[k]:
                    out[k] += ab * row[k]
    return tuple(out)


def ad_matrix(L: LieAlgebra, X: Sequence) -> list[list[Fraction]]:
    """Matrix of ad(X); column j is [X, e_j]."""
    cols = [bracket(L, X, L.basis_vector(j)) for j in range(L.dim)]
    return linalg.transpose(cols)


def check_jacobi(L: LieAlgebra) -> Certificate:
    n = L.dim
    e = [L.basis_vector(i) for i in range(n)]
    items = {}
    failures = []
    for i, j, k in itertools.combinations(range(n), 3):
        cyc = [
            a + b + c
            for a, b, c in zip(
                bracket(L, bracket(L, e[i], e[j]), e[k]),
                bracket(L, bracket(L, e[j], e[k]), e[i]),
                bracket(L, bracket(L, e[k], e[i]), e[j]),
            )
        ]
        label = f"({i},{j},{k})"
        items[label] = tuple(cyc)
        if any(cyc):
            failures.append(label)
            break
    return Certificate("jacobi", not failures, True, items, failures)


def check_representation(L: LieAlgebra) -> Certificate:
    if L.matrix_rep is None:
        return Certificate("representation", True, notes=["no matrix representation"])
    n = L.dim
    items, failures = {}, []
    for i, j in itertools.combinations(range(n), 2):
        a, b = L.matrix_rep[i], L.matrix_rep[j]
        ab = linalg.matmul(a, b)
        ba = linalg.matmul(b, a)
        target = L.rep_matrix(L.structure[i][j])
        res = tuple(tuple(x - y - z for x, y, z in zip(r1, r2, r3)) for r1, r2, r3 in zip(ab, ba, target))
        label = f"({i},{j})"
        items[label] = res
        if any(v for row in res for v in row):
            failures.append(label)
    return Certificate("representation", not failures, True, items, failures)


@dataclass(frozen=True)
class ExpAd:
    matrix: list
    exact: bool

    @property
    def flag(self) -> str:
        return "exact" if self.exact else "numeric"


def exp_ad(L: LieAlgebra, X: Sequence, t) -> ExpAd:
    """e^{t ad X}: a finite series when ad X is nilpotent, else scaling and squaring."""
    n = L.dim
    A = ad_matrix(L, X)
    powers = [[[Fraction(int(i == j)) for j in range(n)] for i in range(n)]]
    nilpotent = False
    for _ in range(n):
        nxt = linalg.matmul(powers[-1], A)
        if all(v == 0 for row in nxt for v in row):
            nilpotent = True
            break
        powers.append(nxt)
    rational_t = isinstance(t, (int, Fraction))
    if nilpotent:
        tt = Fraction(t) if rational_t else float(t)
        out = [[tt * 0 for _ in range(n)] for _ in range(n)]
        for k, P in enumerate(powers):
            scale = tt**k / math.factorial(k)
            for i in range(n):
                for j in range(n):
                    if P[i][j]:
                        out[i][j] += scale * P[i][j]
        return ExpAd(out, rational_t)
    arr = np.array([[float(v) for v in row] for row in A])
    return ExpAd(scipy.linalg.expm(float(t) * arr).tolist(), False)


def apply_matrix(M, v: Sequence):
    return tuple(sum((M[i][j] * v[j] for j in range(len(v))), M[i][0] * 0) for i in range(len(M)))


class Subalgebra:
    """Span of rational vectors, stored as a reduced echelon basis."""

    def __init__(self, parent: LieAlgebra, basis: Sequence[Sequence], check: bool = True):
        self.parent = parent
        rows = [vec(b) for b in basis]
        for r in rows:
            if len(r) != parent.dim:
                raise ValueError("subalgebra vectors must have the algebra's dimension")
        self.basis = tuple(tuple(r) for r in linalg.echelon_basis(rows)) if rows else ()
        if check:
            bad = self.closure_failure()
            if bad is not None:
                raise ValueError(f"span is not closed under the bracket: [b{bad[0]}, b{bad[1]}] leaves it")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        if not self.basis:
            return not any(v)
        return linalg.rank(list(self.basis) + [list(v)]) == self.dim

    def closure_failure(self):
        for i, j in itertools.combinations(range(len(self.basis)), 2):
            if not self.contains(bracket(self.parent, self.basis[i], self.basis[j])):
                return (i, j)
        return None

    def annihilator(self) -> list[list[Fraction]]:
        """Linear functionals (rows) vanishing exactly on the span."""
        if not self.basis:
            return [list(self.parent.basis_vector(i)) for i in range(self.parent.dim)]
        return linalg.nullspace(list(self.basis), self.parent.dim)

    def complement_indices(self) -> list[int]:
        """Standard basis indices that complete the echelon basis (non-pivot columns)."""
        _, pivots = linalg.rref(list(self.basis)) if self.basis else ([], [])
        return [i for i in range(self.parent.dim) if i not in pivots]

    def __eq__(self, other):
        return isinstance(other, Subalgebra) and self.parent == other.parent and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"Subalgebra(dim={self.dim}, basis={[tuple(str(c) for c in b) for b in self.basis]})"


def normalizer(L: LieAlgebra, S: Subalgebra) -> Subalgebra:
    """{X : [X, S] in S}, the exact solution space of a linear system."""
    ann = S.annihilator()
    rows = []
    for s in S.basis:
        images = [bracket(L, L.basis_vector(i), s) for i in range(L.dim)]
        for f in ann:
            rows.append([sum(fi * img[k] for k, fi in enumerate(f)) for img in images])
    rows = [r for r in rows if any(r)]
    if not rows:
        return Subalgebra(L, [L.basis_vector(i) for i in range(L.dim)])
    return Subalgebra(L, linalg.nullspace(rows, L.dim))


@dataclass
class WeylAlgebra:
    complement: list  # basis vectors of a complement of S in N(S)
    quotient: LieAlgebra | None

    @property
    def dim(self) -> int:
        return len(self.complement)


def weyl_algebra(L: LieAlgebra, S: Subalgebra) -> WeylAlgebra:
    """N(S)/S: a complement basis inside the normalizer and the induced bracket."""
    N = normalizer(L, S)
    complement = []
    span = list(S.basis)
    for v in N.basis:
        if linalg.rank(span + [list(v)]) > len(span):
            span.append(list(v))
            complement.append(tuple(v))
    q = len(complement)
    if q == 0:
        return WeylAlgebra([], None)
    basis_rows = list(S.basis) + complement  # coordinates: first S, then complement
    cols = linalg.transpose(basis_rows)
    table = [[[Fraction(0)] * q for _ in range(q)] for _ in range(q)]
    for a, b in itertools.product(range(q), repeat=2):
        w = bracket(L, complement[a], complement[b])
        coords = linalg.solve(cols, list(w))
        table[a][b] = coords[S.dim :]
    names = [f"q{i + 1}" for i in range(q)]
    return WeylAlgebra(complement, LieAlgebra(names, table, name="weyl"))


class InvariantPolynomial:
    """Symmetric k-linear form on g; ``coeffs[sorted multi-index] = f(e_i1, ..., e_ik)``."""

    def __init__(self, degree: int, dim: int, coeffs: Mapping[tuple[int, ...], object]):
        if degree < 1:
            raise ValueError("degree must be positive")
        self.degree = degree
        self.dim = dim
        clean = {}
        for idx, c in coeffs.items():
            key = tuple(sorted(idx))
            if len(key) != degree or any(not 0 <= i < dim for i in key):
                raise ValueError(f"bad multi-index {idx}")
            c = Fraction(c)
            if key in clean and clean[key] != c:
                raise ValueError(f"coefficients not symmetric at {idx}")
            if c:
                clean[key] = c
        self.coeffs = clean

    @classmethod
    def from_tensor(cls, degree: int, dim: int, func) -> InvariantPolynomial:
        """Tabulate ``func(i1, ..., ik)``; raises if the result is not symmetric."""
        coeffs = {}
        for idx in itertools.product(range(dim), repeat=degree):
            value = Fraction(func(*idx))
            key = tuple(sorted(idx))
            if key in coeffs and coeffs[key] != value:
                raise ValueError(f"tensor is not symmetric at {idx}")
            coeffs[key] = value
        return cls(degree, dim, coeffs)

    @classmethod
    def linear(cls, covector: Sequence) -> InvariantPolynomial:
        return cls(1, len(covector), {(i,): c for i, c in enumerate(covector)})

    def coefficient(self, idx: Sequence[int]):
        return self.coeffs.get(tuple(sorted(idx)), Fraction(0))

    def __call__(self, *vectors):
        if len(vectors) != self.degree:
            raise ValueError(f"expected {self.degree} arguments")
        total = Fraction(0)
        for idx, c in self.coeffs.items():
            for perm in set(itertools.permutations(idx)):
                term = c
                for v, i in zip(vectors, perm):
                    term *= v[i]
                    if not term:
                        break
                total += term
        return total

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        return f"InvariantPolynomial(degree={self.degree}, coeffs={ {k: str(v) for k, v in self.coeffs.items()} })"


def check_invariance(f: InvariantPolynomial, L: LieAlgebra, rho=None) -> Certificate:
    """Exact check of sum_i f(v_1, ..., rho(X) v_i, ..., v_k) = 0 on basis tuples (rho = ad by default)."""
    n = L.dim
    mats = [ad_matrix(L, L.basis_vector(a)) for a in range(n)] if rho is None else [
        [[Fraction(v) for v in row] for row in m] for m in rho
    ]
    m = len(mats[0])
    basis = [tuple(Fraction(int(i == j)) for i in range(m)) for j in range(m)]
    items = {}
    for a in range(n):
        for idx in itertools.combinations_with_replacement(range(m), f.degree):
            vs = [basis[i] for i in idx]
            total = Fraction(0)
            for pos in range(f.degree):
                moved = list(vs)
                moved[pos] = apply_matrix(mats[a], vs[pos])
                total += f(*moved)
            if total:
                label = f"X={L.basis_names[a]}, v={tuple(idx)}"
                items[label] = total
                return Certificate("invariance", False, True, items, [label])
    return Certificate("invariance", True, True, items)


def trace_polynomial(L: LieAlgebra, k: int) -> InvariantPolynomial:
    """Full polarization of X -> tr(rho(X)^k) for the algebra's matrix representation."""
    if L.matrix_rep is None:
        raise ValueError("trace_polynomial needs a matrix representation")
    mats = L.matrix_rep

    def entry(*idx):
        total = Fraction(0)
        for perm in itertools.permutations(idx):
            prod = mats[perm[0]]
            for p in perm[1:]:
                prod = linalg.matmul(prod, mats[p])
            total += sum(prod[i][i] for i in range(len(prod)))
        return total / math.factorial(len(idx))

    return InvariantPolynomial.from_tensor(k, L.dim, entry)


def killing_form(L: LieAlgebra) -> InvariantPolynomial:
    ads = [ad_matrix(L, L.basis_vector(i)) for i in range(L.dim)]

    def entry(i, j):
        prod = linalg.matmul(ads[i], ads[j])
        return sum(prod[r][r] for r in range(L.dim))

    return InvariantPolynomial.from_tensor(2, L.dim, entry)
