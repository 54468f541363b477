"""Exact rational row reduction."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def rref(rows: Sequence[Sequence]) -> tuple[tuple[tuple[Fraction, ...], ...], tuple[int, ...]]:
    """Reduced row-echelon form with first-nonzero pivoting.

    Returns the nonzero rows (canonical, so equal row spaces give equal
    output) and the pivot columns.
    """
    m = [[Fraction(c) for c in r] for r in rows]
    if not m:
        return (), ()
    ncols = len(m[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        if p != 1:
            m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(row) for row in m[:r]), tuple(pivots)


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[0])


def nullspace(matrix: Sequence[Sequence], ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of ``{v : matrix @ v = 0}``."""
    if ncols is None:
        if not matrix:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(matrix[0])
    red, pivots = rref(matrix) if matrix else ((), ())
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def reduce_vector(basis_rref: Sequence[Sequence[Fraction]], pivots: Sequence[int], v: Sequence) -> tuple[Fraction, ...]:
    """Residual of ``v`` after eliminating against an RREF basis."""
    out = [Fraction(c) for c in v]
    for row, p in zip(basis_rref, pivots):
        f = out[p]
        if f:
            out = [a - f * b for a, b in zip(out, row)]
    return tuple(out)
