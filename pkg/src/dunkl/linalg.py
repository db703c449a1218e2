"""Small dense linear algebra over exact rationals."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class SingularSystemError(ArithmeticError):
    def __init__(self, message: str, rank: int | None = None):
        super().__init__(message)
        self.rank = rank


def rref(rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form (in place on a copy) and the pivot columns."""
    a = [list(r) for r in rows]
    if not a:
        return a, []
    n_rows, n_cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / Fraction(a[r][c])
        a[r] = [v * inv for v in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                ai, ar = a[i], a[r]
                a[i] = [x - f * y for x, y in zip(ai, ar)]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(rows: list[list]) -> int:
    return len(rref(rows)[1])


def solve(matrix: Sequence[Sequence], rhs: Sequence[Sequence]) -> list[list]:
    """Solve ``matrix @ X = rhs`` exactly for a full-column-rank, possibly tall matrix.

    ``rhs`` holds one column per right-hand side, given as a list of columns.
    Raises :class:`SingularSystemError` when the solution is not unique or a
    right-hand side is inconsistent.
    """
    n_rows = len(matrix)
    n_cols = len(matrix[0]) if n_rows else 0
    k = len(rhs)
    aug = [list(matrix[i]) + [rhs[j][i] for j in range(k)] for i in range(n_rows)]
    red, pivots = rref(aug)
    coeff_pivots = [p for p in pivots if p < n_cols]
    if len(coeff_pivots) < n_cols:
        raise SingularSystemError(
            f"rank {len(coeff_pivots)} < {n_cols} unknowns", rank=len(coeff_pivots)
        )
    if len(pivots) > n_cols:
        raise SingularSystemError("inconsistent right-hand side", rank=n_cols)
    return [[red[i][n_cols + j] for i in range(n_cols)] for j in range(k)]


def mat_vec(m: Sequence[Sequence], v: Sequence) -> list:
    return [sum((a * b for a, b in zip(row, v)), 0) for row in m]
