"""Exact linear algebra over the rationals (row reduction, solve, nullspace)."""

from __future__ import annotations

from fractions import Fraction

Matrix = list[list[Fraction]]


def rref(matrix: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (R, pivot column indices)."""
    m = [row[:] for row in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def solve(a: Matrix, b: list[Fraction]) -> tuple[list[Fraction] | None, list[Fraction] | None]:
    """Solve A x = b exactly.

    Returns (solution, None) for a consistent system (one particular solution,
    free variables set to 0) or (None, certificate) when infeasible.  The
    certificate y satisfies y^T A = 0 and y^T b != 0, extracted by carrying an
    identity block through the elimination.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if rows == 0:
        if any(x != 0 for x in b):
            return None, [Fraction(1)]
        return [Fraction(0)] * cols, None
    aug = [
        list(a[i]) + [b[i]] + [Fraction(1 if j == i else 0) for j in range(rows)]
        for i in range(rows)
    ]
    red, pivots = rref(aug)
    for i, row in enumerate(red):
        if all(row[c] == 0 for c in range(cols)) and row[cols] != 0:
            return None, row[cols + 1:]
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        if c < cols:
            x[c] = red[i][cols]
    return x, None


def nullspace(a: Matrix, cols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : A x = 0}. `cols` needed when A has no rows."""
    rows = len(a)
    if rows == 0:
        if cols is None:
            raise ValueError("need column count for empty matrix")
        return [
            [Fraction(1 if j == i else 0) for j in range(cols)]
            for i in range(cols)
        ]
    ncols = len(a[0])
    red, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for i, c in enumerate(pivots):
            vec[c] = -red[i][f]
        basis.append(vec)
    return basis
