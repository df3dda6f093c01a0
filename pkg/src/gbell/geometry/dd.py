"""Exact vertex enumeration by the double description method.

The polytope ``{x : A x <= b, E x = e}`` is homogenized to the cone
``{(x, t) : b t - A x >= 0, E x - e t = 0, t >= 0}`` and the equalities are
eliminated by exact row reduction, leaving a pointed cone ``{z : C z >= 0}``
in the affine hull's coordinates.  Rays are integer vectors; the zero set of
each ray is a packed bitset, and two rays are adjacent when no third ray's
zero set contains the intersection of theirs (the combinatorial test).
"""
from __future__ import annotations

import hashlib
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from pathlib import Path

import numpy as np

from ..errors import BudgetExceededError, InfeasibleError, UnboundedPolytopeError
from .linalg import _fits_int64, _max_abs, exact_matmul, independent_rows, integer_row, inverse_columns, rref
from .polytope import HPolytope, VPolytope, verify_vertices

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class AffineReduction:
    """Parametrization of the homogenized affine hull by its free coordinates.

    ``lift @ z`` gives ``denominator * (x, t)`` for free coordinates ``z``; the
    cone rows ``rows`` satisfy ``rows @ z >= 0`` exactly on the homogenized
    polytope.  ``t`` is always the last free coordinate.
    """

    dim: int
    free: tuple[int, ...]
    lift: np.ndarray  # (dim + 1, len(free)) object array of ints
    denominator: int
    rows: tuple[tuple[int, ...], ...]
    row_origin: tuple[int, ...]  # source inequality index, -1 for t >= 0

    @property
    def cone_dim(self) -> int:
        return len(self.free)


def reduce_affine(h: HPolytope) -> AffineReduction:
    n = h.dim
    eq_rows = [list(a) + [-b] for a, b in h.equalities]
    R, piv = rref(eq_rows, n + 1) if eq_rows else ([], [])
    if n in piv:
        raise InfeasibleError("equality constraints are inconsistent")
    free = [c for c in range(n + 1) if c not in piv]
    # express every coordinate of (x, t) through the free ones
    lift_q = [[Fraction(0)] * len(free) for _ in range(n + 1)]
    for j, c in enumerate(free):
        lift_q[c][j] = Fraction(1)
    for row, p in zip(R, piv):
        for j, c in enumerate(free):
            lift_q[p][j] = -row[c]
    den = reduce(lcm, (v.denominator for r in lift_q for v in r), 1)
    lift = np.array([[int(v * den) for v in r] for r in lift_q], dtype=object)

    rows, origin, seen = [], [], set()
    for i, (a, b) in enumerate(h.inequalities):
        # b t - a.x >= 0, pulled back through the lift
        hom = [-v for v in a] + [b]
        coeff = [sum(hom[k] * lift_q[k][j] for k in range(n + 1) if hom[k] and lift_q[k][j]) for j in range(len(free))]
        r = integer_row(coeff)
        if not any(r):
            continue  # constant on the affine hull
        key = tuple(r)
        if key not in seen:
            seen.add(key)
            rows.append(key)
            origin.append(i)
    t_row = tuple(1 if j == len(free) - 1 else 0 for j in range(len(free)))
    if t_row not in seen:
        rows.append(t_row)
        origin.append(-1)
    return AffineReduction(n, tuple(free), lift, den, tuple(rows), tuple(origin))


def _setbit(Z: np.ndarray, mask, bit: int) -> None:
    Z[mask, bit // 64] |= np.uint64(1) << np.uint64(bit % 64)


def _row_gcd(r: np.ndarray) -> np.ndarray:
    if r.dtype == object:
        g = reduce(gcd, (abs(int(v)) for v in r), 0)
        return r // (g or 1)
    g = np.gcd.reduce(r)
    return r // (g if g else 1)


class _Checkpoint:
    def __init__(self, path, rows, interval: float):
        self.path = Path(path) if path is not None else None
        self.interval = interval
        self.last = time.monotonic()
        self.key = hashlib.sha256(repr(rows).encode()).hexdigest()

    def load(self):
        if self.path is None or not self.path.exists():
            return None
        with np.load(self.path, allow_pickle=True) as f:
            if str(f["key"]) != self.key:
                log.warning("checkpoint %s belongs to a different system; ignoring it", self.path)
                return None
            log.info("resuming from checkpoint %s", self.path)
            return f["rays"], f["zero"], [int(i) for i in f["rest"]]

    def maybe_save(self, rays, Z, rest, force=False):
        if self.path is None:
            return
        now = time.monotonic()
        if not force and now - self.last < self.interval:
            return
        tmp = self.path.with_name(self.path.name + ".tmp.npz")
        np.savez(tmp, key=self.key, rays=rays, zero=Z, rest=np.array(rest, dtype=np.int64))
        tmp.replace(self.path)
        self.last = now


def extreme_rays(
    rows,
    *,
    budget: int | None = DEFAULT_BUDGET,
    checkpoint=None,
    checkpoint_interval: float = 60.0,
) -> np.ndarray:
    """Extreme rays of the pointed cone ``{z : rows @ z >= 0}``.

    ``rows`` must have full column rank.  Raises ``BudgetExceededError`` when
    an intermediate ray count exceeds ``budget``.
    """
    A = np.array(rows, dtype=object)
    m, D = A.shape
    if _max_abs(A) < 2**31:
        A = A.astype(np.int64)
    W = (m + 63) // 64
    ckpt = _Checkpoint(checkpoint, rows, checkpoint_interval)

    state = ckpt.load()
    if state is not None:
        rays, Z, rest = state
    else:
        basis = independent_rows(A.tolist(), limit=D)
        if len(basis) < D:
            raise UnboundedPolytopeError("cone has a nontrivial lineality space")
        cols = inverse_columns([A[i].tolist() for i in basis])
        rays = np.array(cols, dtype=object)
        if _max_abs(rays) < 2**31:
            rays = rays.astype(np.int64)
        Z = np.zeros((D, W), dtype=np.uint64)
        for j in range(D):
            for k, i in enumerate(basis):
                if k != j:
                    _setbit(Z, j, i)
        chosen = set(basis)
        rest = [i for i in range(m) if i not in chosen]

    need = D - 2
    while rest:
        S = exact_matmul(rays, A[rest].T)
        k = int(np.argmax((S < 0).sum(0)))
        i = rest.pop(k)
        v = S[:, k]
        pos = np.nonzero(v > 0)[0]
        neg = v < 0
        zer = np.nonzero(v == 0)[0]
        new_rays, new_zero = [], []
        if neg.any():
            vmax = _max_abs(v)
            rmax = _max_abs(rays)
            as_int = _fits_int64(2 * vmax, rmax)
            for p in pos:
                Y = Z & Z[p]
                near = np.nonzero(np.bitwise_count(Y).sum(1) >= need)[0]
                qs = near[neg[near]]
                if len(qs) == 0:
                    continue
                Yn = Y[near]
                for q in qs:
                    z = Y[q]
                    if int(((Yn & z) == z).all(1).sum()) > 2:
                        continue
                    if as_int:
                        r = int(-v[q]) * rays[p] + int(v[p]) * rays[q]
                    else:
                        r = int(-v[q]) * rays[p].astype(object) + int(v[p]) * rays[q].astype(object)
                    new_rays.append(_row_gcd(r))
                    new_zero.append(z)
        keep = np.concatenate([pos, zer])
        Zk = Z[keep].copy()
        _setbit(Zk, np.arange(len(keep)) >= len(pos), i)
        if new_rays:
            nz = np.array(new_zero, dtype=np.uint64)
            _setbit(nz, slice(None), i)
            dtype = object if rays.dtype == object or any(r.dtype == object for r in new_rays) else np.int64
            rays = np.concatenate([rays[keep].astype(dtype), np.array(new_rays, dtype=dtype)])
            Z = np.concatenate([Zk, nz])
        else:
            rays, Z = rays[keep], Zk
        if rays.dtype == object and _max_abs(rays) < 2**31:
            rays = rays.astype(np.int64)
        log.debug("row %d inserted: %d rays, %d rows left", i, len(rays), len(rest))
        if budget is not None and len(rays) > budget:
            ckpt.maybe_save(rays, Z, rest, force=True)
            raise BudgetExceededError(budget, len(rays))
        ckpt.maybe_save(rays, Z, rest)
    if ckpt.path is not None and ckpt.path.exists():
        ckpt.path.unlink()
    return rays


def enumerate_vertices(
    h: HPolytope,
    *,
    budget: int | None = DEFAULT_BUDGET,
    checkpoint=None,
    checkpoint_interval: float = 60.0,
    scenario=None,
    verify: bool = True,
) -> VPolytope:
    """All vertices of a bounded polytope, exactly and in canonical order."""
    red = reduce_affine(h.reduced())
    if red.cone_dim == 1:
        # the affine hull is a single point
        rays = np.array([[1]], dtype=np.int64)
    else:
        rays = extreme_rays(red.rows, budget=budget, checkpoint=checkpoint, checkpoint_interval=checkpoint_interval)
    full = exact_matmul(rays, red.lift.T)  # rows are denominator * (x, t)
    t = full[:, -1]
    if (t <= 0).all():
        raise InfeasibleError("polytope is empty")
    if (t == 0).any():
        raise UnboundedPolytopeError(f"{int((t == 0).sum())} recession directions found")
    v = VPolytope(full[:, :-1], t, scenario if scenario is not None else h.scenario)
    if verify:
        bad = verify_vertices(h, v)
        if bad:
            raise AssertionError(f"enumerated points violate the H-representation: {bad[:5]}")
    return v
