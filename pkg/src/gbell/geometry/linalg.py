"""Exact rational linear algebra on small dense matrices.

Rows are scaled to primitive integer vectors before elimination; this keeps
Gauss-Jordan fraction free and is much faster than Fraction arithmetic.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm

import numpy as np

_INT64_SAFE = 2**62


def integer_row(row) -> list[int]:
    """Smallest positive multiple of a rational row with integer entries."""
    row = [Fraction(v) for v in row]
    den = reduce(lcm, (v.denominator for v in row), 1)
    ints = [int(v * den) for v in row]
    g = reduce(gcd, ints, 0)
    return [v // g for v in ints] if g > 1 else ints


def _primitive(row: list[int]) -> list[int]:
    g = reduce(gcd, row, 0)
    return [v // g for v in row] if g > 1 else row


def rref(rows, ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns the nonzero rows and pivot columns."""
    mat = [integer_row(r) for r in rows]
    if not mat:
        return [], []
    ncols = ncols if ncols is not None else len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        prow = mat[r]
        pv = prow[c]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = _primitive([a * pv - f * b for a, b in zip(mat[i], prow)])
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    out = []
    for i, c in enumerate(pivots):
        pv = mat[i][c]
        out.append([Fraction(v, pv) for v in mat[i]])
    return out, pivots


def rank(rows, ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1]) if rows else 0


def nullspace(rows, ncols: int) -> list[list[Fraction]]:
    """Basis of ``{v : rows @ v = 0}``, one vector per free column."""
    R, piv = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(R, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis


def independent_rows(rows, limit: int | None = None) -> list[int]:
    """Indices of a maximal linearly independent subset, greedy in row order."""
    chosen: list[int] = []
    basis: list[list[int]] = []
    pivcols: list[int] = []
    for i, row in enumerate(rows):
        v = integer_row(row)
        for b, c in zip(basis, pivcols):
            if v[c] != 0:
                f, pv = v[c], b[c]
                v = _primitive([a * pv - f * x for a, x in zip(v, b)])
        nz = next((c for c, a in enumerate(v) if a != 0), None)
        if nz is None:
            continue
        basis.append(v)
        pivcols.append(nz)
        chosen.append(i)
        if limit is not None and len(chosen) == limit:
            break
    return chosen


def solve_square(rows, rhs) -> list[Fraction]:
    """Solve ``rows @ x = rhs`` for a nonsingular square system."""
    n = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, piv = rref(aug, n)
    if piv != list(range(n)):
        raise ValueError("singular system")
    return [R[i][n] for i in range(n)]


def inverse_columns(rows: list[list[int]]) -> list[list[int]]:
    """Primitive integer columns ``c_j`` with ``rows @ c_j`` a positive multiple of ``e_j``."""
    n = len(rows)
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    R, piv = rref(aug, n)
    if piv != list(range(n)):
        raise ValueError("singular basis")
    cols = []
    for j in range(n):
        col = [R[i][n + j] for i in range(n)]
        cols.append(integer_row(col))
    return cols


def _fits_int64(*bounds) -> bool:
    prod = 1
    for b in bounds:
        prod *= max(int(b), 1)
    return prod < _INT64_SAFE


def _max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a.flat)
    return int(np.abs(a).max())


def exact_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Integer matrix product in int64 when provably safe, else in Python ints."""
    k = A.shape[1] if A.ndim == 2 else A.shape[0]
    if _fits_int64(_max_abs(A), _max_abs(B), k):
        return A.astype(np.int64) @ B.astype(np.int64)
    return A.astype(object) @ B.astype(object)
