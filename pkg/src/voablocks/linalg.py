"""Tiny dense exact linear algebra over the Scalar field."""

from __future__ import annotations

from .scalars import Scalar

S0 = Scalar.integer(0)
S1 = Scalar.integer(1)


def solve(rows, rhs):
    """Solve an (overdetermined) exact linear system.

    Returns (solution, unique) on success with free variables set to zero,
    or None when the system is inconsistent.
    """
    m = len(rows)
    cols = len(rows[0]) if m else 0
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    row = 0
    for col in range(cols):
        piv = None
        for r in range(row, m):
            if not a[r][col].is_zero():
                piv = r
                break
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = a[row][col].inverse()
        a[row] = [x * inv for x in a[row]]
        for r in range(m):
            if r != row and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if not a[r][cols].is_zero():
            return None
    x = [S0] * cols
    for r, col in enumerate(pivots):
        x[col] = a[r][cols]
    return x, len(pivots) == cols


def invert(matrix):
    """Exact inverse of a square matrix, or None if singular."""
    n = len(matrix)
    cols = []
    for j in range(n):
        rhs = [S1 if i == j else S0 for i in range(n)]
        sol = solve(matrix, rhs)
        if sol is None or not sol[1]:
            return None
        cols.append(sol[0])
    return [[cols[j][i] for j in range(n)] for i in range(n)]
