"""Exact linear programming by an integer-preserving simplex method.

The tableau is stored as integers with one common denominator ``d`` (the
previous pivot element), in the style of Bareiss/Edmonds: after pivoting on
``(r, s)`` every row ``i != r`` becomes ``(T_i * T_rs - T_is * T_r) / d`` with
exact division.  No fractions are formed until the solution is read off.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm

import numpy as np

from ..errors import InfeasibleError, UnboundedPolytopeError
from .linalg import integer_row
from .polytope import HPolytope

# consecutive degenerate pivots tolerated before switching to Bland's rule
_DEGENERATE_STREAK = 50


@dataclass(frozen=True)
class LPResult:
    value: Fraction
    x: tuple[Fraction, ...]
    basis: tuple[int, ...]
    pivots: int


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T  # (m, N + 1) object ints, last column is the right-hand side
        self.basis = basis
        self.d = 1
        self.obj = None
        self.pivots = 0

    def set_objective(self, c: list[int]) -> None:
        """Objective row ``d * (c_B B^-1 A - c)`` for maximizing ``c . x``."""
        cB = np.array([c[j] for j in self.basis], dtype=object)
        cc = np.array(list(c) + [0], dtype=object)
        if len(self.basis):
            self.obj = cB @ self.T - self.d * cc
        else:
            self.obj = -self.d * cc
        # Bareiss rows are d times the true tableau, so c_B @ T is already scaled

    def pivot(self, r: int, s: int) -> None:
        T, d = self.T, self.d
        prow = T[r].copy()
        prs = prow[s]
        col = T[:, s].copy()
        T[:] = (T * prs - np.outer(col, prow)) // d
        T[r] = prow
        o = self.obj
        if o is not None:
            self.obj = (o * prs - o[s] * prow) // d
        self.d = prs
        if prs < 0:
            self.T = -self.T
            if self.obj is not None:
                self.obj = -self.obj
            self.d = -prs
        self.basis[r] = s
        self.pivots += 1

    def run(self, allowed: np.ndarray) -> None:
        """Primal simplex on the current objective over columns in ``allowed``."""
        bland = False
        streak = 0
        m = len(self.basis)
        while True:
            red = self.obj[:-1]
            cand = np.nonzero(allowed & (red < 0))[0]
            if len(cand) == 0:
                return
            if bland:
                s = int(cand[0])
            else:
                vals = red[cand]
                s = int(cand[int(np.argmin(vals))])
            col = self.T[:, s]
            rhs = self.T[:, -1]
            best = None
            for i in np.nonzero(col > 0)[0]:
                num, den = rhs[i], col[i]
                if best is None:
                    best = (i, num, den)
                    continue
                lhs, rhs_ = num * best[2], best[1] * den
                if lhs < rhs_ or (lhs == rhs_ and self.basis[i] < self.basis[best[0]]):
                    best = (i, num, den)
            if best is None:
                raise UnboundedPolytopeError("objective is unbounded above")
            degenerate = best[1] == 0
            self.pivot(int(best[0]), s)
            streak = streak + 1 if degenerate else 0
            if streak > _DEGENERATE_STREAK + m:
                bland = True

    def solution(self, n: int) -> list[Fraction]:
        x = [Fraction(0)] * n
        for i, j in enumerate(self.basis):
            if j < n:
                x[j] = Fraction(int(self.T[i, -1]), int(self.d))
        return x

    def value(self) -> Fraction:
        return Fraction(int(self.obj[-1]), int(self.d))


def _int_rows(A, b):
    out = []
    for row, rhs in zip(A, b):
        r = integer_row(list(row) + [rhs])
        out.append(r)
    return out


def simplex_max(c, A_eq=(), b_eq=(), A_ub=(), b_ub=()) -> LPResult:
    """Maximize ``c.x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``x >= 0``.

    All data are rationals (ints, Fractions or anything ``Fraction`` accepts).
    Raises ``InfeasibleError`` or ``UnboundedPolytopeError``.
    """
    n = len(c)
    eq = _int_rows(A_eq, b_eq)
    ub = _int_rows(A_ub, b_ub)
    n_slack = len(ub)
    rows = []
    for r in eq:
        rows.append((r[:-1] + [0] * n_slack, r[-1]))
    for k, r in enumerate(ub):
        slack = [0] * n_slack
        slack[k] = 1
        rows.append((r[:-1] + slack, r[-1]))
    m = len(rows)
    # flip rows to nonnegative right-hand sides, then choose a starting basis
    basis, need_art = [], []
    for i, (a, rhs) in enumerate(rows):
        if rhs < 0:
            rows[i] = ([-v for v in a], -rhs)
        a, rhs = rows[i]
        if i >= len(eq) and a[n + i - len(eq)] == 1:
            basis.append(n + i - len(eq))
        else:
            basis.append(None)
            need_art.append(i)
    n_struct = n + n_slack
    n_art = len(need_art)
    N = n_struct + n_art
    T = np.zeros((m, N + 1), dtype=object)
    for i, (a, rhs) in enumerate(rows):
        T[i, :n_struct] = a
        T[i, -1] = rhs
    for k, i in enumerate(need_art):
        T[i, n_struct + k] = 1
        basis[i] = n_struct + k
    tab = _Tableau(T, basis)

    if n_art:
        tab.set_objective([0] * n_struct + [-1] * n_art)
        tab.run(np.ones(N, dtype=bool))
        if tab.value() < 0:
            raise InfeasibleError("constraints admit no feasible point")
        # drive zero-level artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(tab.basis):
            if tab.basis[i] >= n_struct:
                nz = np.nonzero(tab.T[i, :n_struct] != 0)[0]
                if len(nz):
                    tab.pivot(i, int(nz[0]))
                else:
                    tab.T = np.delete(tab.T, i, axis=0)
                    tab.obj = None
                    del tab.basis[i]
                    continue
            i += 1
        tab.T = np.delete(tab.T, np.s_[n_struct:N], axis=1)

    cint = integer_row(list(c) + [0])[:-1] if any(Fraction(v) for v in c) else [0] * n
    scale = _scale_of(c, cint)
    tab.set_objective(cint + [0] * n_slack)
    tab.run(np.ones(n_struct, dtype=bool))
    x = tab.solution(n)
    return LPResult(tab.value() / scale, tuple(x), tuple(tab.basis), tab.pivots)


def _scale_of(c, cint) -> Fraction:
    for v, w in zip(c, cint):
        if Fraction(v) != 0:
            return Fraction(w) / Fraction(v)
    return Fraction(1)


@dataclass(frozen=True)
class LinearMax:
    value: Fraction
    point: tuple[Fraction, ...]
    tight_rows: tuple[int, ...]


def maximize_linear(h: HPolytope, functional) -> LinearMax:
    """Exact maximum of ``functional . x`` over ``h`` with a vertex optimizer.

    Coordinates with an explicit ``-x_i <= 0`` row are treated as
    nonnegative variables; every other coordinate is split into two.
    """
    f = [Fraction(v) for v in functional]
    if len(f) != h.dim:
        raise ValueError(f"functional has {len(f)} coefficients, polytope dimension is {h.dim}")
    nonneg_rows = h.nonnegative_coordinates()
    signed = set(i for i in nonneg_rows if i is not None)
    free = [i for i in range(h.dim) if i not in signed]
    # column layout: original coordinates, then negative parts of free ones
    def expand(a):
        a = list(a)
        return a + [-a[i] for i in free]

    c = expand(f)
    A_eq = [expand(a) for a, _ in h.equalities]
    b_eq = [b for _, b in h.equalities]
    A_ub = [expand(a) for (a, b), k in zip(h.inequalities, nonneg_rows) if k is None]
    b_ub = [b for (a, b), k in zip(h.inequalities, nonneg_rows) if k is None]
    res = simplex_max(c, A_eq, b_eq, A_ub, b_ub)
    x = list(res.x[: h.dim])
    for k, i in enumerate(free):
        x[i] -= res.x[h.dim + k]
    return LinearMax(res.value, tuple(x), tuple(h.tight_rows(x)))


def max_over_points(points, functional) -> tuple[Fraction, list[int]]:
    """Brute-force maximum of a functional over a finite point set, with argmax indices."""
    f = [Fraction(v) for v in functional]
    best, arg = None, []
    for k, p in enumerate(points):
        val = sum(a * Fraction(b) for a, b in zip(f, p) if a)
        if best is None or val > best:
            best, arg = val, [k]
        elif val == best:
            arg.append(k)
    return best, arg


def common_scale(values) -> int:
    return reduce(lcm, (Fraction(v).denominator for v in values), 1)
