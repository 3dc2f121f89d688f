"""Gauss-Jordan elimination over exact fields.

Works for ``Fraction`` entries and for ``RationalFunction`` entries alike; the
only requirements are field arithmetic and an exact zero test.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .ratfunc import RationalFunction


def is_zero(value) -> bool:
    if isinstance(value, RationalFunction):
        return value.is_zero()
    return value == 0


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if not is_zero(m[i][c])), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c] if not isinstance(m[r][c], int) else Fraction(1, m[r][c])
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and not is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[: len(pivots)], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None, one=Fraction(1)) -> list[list]:
    """Basis of {v : rows . v = 0}, one vector per free column."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        zero = one * 0
        return [[one if j == i else zero for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(rows)
    zero = one * 0
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, one=Fraction(1)):
    """One solution of rows . v = rhs (free variables set to zero), or None."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    zero = one * 0
    v = [zero] * ncols
    for row, p in zip(red, pivots):
        v[p] = row[ncols]
    return v


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        out_row = []
        for j in range(cols):
            acc = row[0] * b[0][j]
            for k in range(1, inner):
                acc = acc + row[k] * b[k][j]
            out_row.append(acc)
        out.append(out_row)
    return out


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def inverse(a: Sequence[Sequence], one=Fraction(1)) -> list[list] | None:
    n = len(a)
    zero = one * 0
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        return None
    return [row[n:] for row in red]


def echelon_basis(vectors: Sequence[Sequence]) -> list[list]:
    """Canonical (reduced echelon) basis of the span; drops dependent vectors."""
    if not vectors:
        return []
    red, _ = rref(vectors)
    return red
