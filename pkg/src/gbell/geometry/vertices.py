"""Vertex sets known in closed form: deterministic, n-cycle ND and generalized-local."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..behavior import Behavior, behavior_from_correlators
from ..errors import InvalidScenarioError, PreconditionError
from ..scenario import OUTCOMES, ContextualityScenario, GeneralizedBellScenario, Scenario, n_cycle
from .polytope import VPolytope


def _assignment_matrix(s: Scenario, assignments) -> np.ndarray:
    ids = s.measurement_ids
    pos = {m: i for i, m in enumerate(ids)}
    rows = np.zeros((len(assignments), s.dim), dtype=np.int64)
    for r, vals in enumerate(assignments):
        for k, ctx in enumerate(s.contexts):
            rows[r, s.index(k, tuple(vals[pos[m]] for m in ctx))] = 1
    return rows


def deterministic_vertices(s: Scenario) -> VPolytope:
    """Every global +-1 assignment as a behavior.

    For a generalized Bell scenario this is the set of classical vertices
    (Alice assignment times Bob assignment).
    """
    assignments = list(itertools.product(OUTCOMES, repeat=len(s.measurement_ids)))
    num = _assignment_matrix(s, assignments)
    return VPolytope(num, np.ones(len(num), dtype=np.int64), s)


@dataclass(frozen=True)
class NCycleVertexSpec:
    """An n-cycle ND vertex: a global assignment, or a contextual sign vector.

    Contextual vertices have ``<B_i> = 0`` and ``<B_i B_{i+1}> = gamma_i`` with
    an odd number of ``gamma_i = -1``.
    """

    kind: str
    signs: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("deterministic", "contextual"):
            raise ValueError(f"unknown vertex kind {self.kind!r}")
        if any(s not in OUTCOMES for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        if self.kind == "contextual" and self.signs.count(-1) % 2 == 0:
            raise ValueError("a contextual n-cycle vertex needs an odd number of -1 signs")

    @property
    def n(self) -> int:
        return len(self.signs)

    def behavior(self, scenario: ContextualityScenario | None = None) -> Behavior:
        s = scenario or n_cycle(self.n)
        ids = s.measurement_ids
        if self.kind == "deterministic":
            spec = {(m,): v for m, v in zip(ids, self.signs)}
            spec.update({c: self.signs[i] * self.signs[(i + 1) % self.n] for i, c in enumerate(s.contexts)})
        else:
            spec = {c: g for c, g in zip(s.contexts, self.signs)}
        return behavior_from_correlators(s, spec)


def contextual_sign_vectors(n: int) -> list[tuple[int, ...]]:
    return [g for g in itertools.product(OUTCOMES, repeat=n) if g.count(-1) % 2 == 1]


def ncycle_vertex_specs(n: int) -> list[NCycleVertexSpec]:
    if n < 3:
        raise InvalidScenarioError(f"n-cycle needs n >= 3, got {n}")
    det = [NCycleVertexSpec("deterministic", a) for a in itertools.product(OUTCOMES, repeat=n)]
    ctx = [NCycleVertexSpec("contextual", g) for g in contextual_sign_vectors(n)]
    return det + ctx


def ncycle_nd_vertices(n: int) -> VPolytope:
    """The 2**n deterministic and 2**(n-1) contextual vertices of the n-cycle ND polytope."""
    s = n_cycle(n)
    return VPolytope.from_behaviors([spec.behavior(s) for spec in ncycle_vertex_specs(n)])


def ncycle_contextual_vertices(n: int) -> list[Behavior]:
    s = n_cycle(n)
    return [NCycleVertexSpec("contextual", g).behavior(s) for g in contextual_sign_vectors(n)]


def _is_ncycle(bob: ContextualityScenario) -> bool:
    n = len(bob.measurements)
    return n >= 3 and bob == n_cycle(n)


def bob_nd_vertices(bob: ContextualityScenario) -> VPolytope:
    if _is_ncycle(bob):
        return ncycle_nd_vertices(len(bob.measurements))
    raise PreconditionError(
        f"no closed-form ND vertex list for {bob.name or 'this scenario'}; enumerate it and pass it explicitly"
    )


def local_vertices(g: GeneralizedBellScenario, bob_vertices: VPolytope | None = None) -> VPolytope:
    """Deterministic Alice assignments times Bob ND vertices (generalized locality)."""
    bv = bob_vertices if bob_vertices is not None else bob_nd_vertices(g.bob)
    if bv.dim != g.bob.dim:
        raise PreconditionError("Bob vertex list does not match Bob's scenario")
    nb = len(g.bob.contexts)
    bob_num = bv.numerators
    bob_den = bv.denominators
    offsets = [g.bob.context_slice(kb) for kb in range(nb)]
    nums, dens = [], []
    for alice in itertools.product(OUTCOMES, repeat=g.n_alice):
        block = np.zeros((len(bv), g.dim), dtype=bob_num.dtype)
        for x, kb in g.joint_contexts:
            k = g.joint_index(x, kb)
            start = g.context_offsets[k]
            width = offsets[kb].stop - offsets[kb].start
            # outcome a occupies the first (a = +1) or second half of the context block
            half = 0 if alice[x] == 1 else width
            block[:, start + half : start + half + width] = bob_num[:, offsets[kb]]
        nums.append(block)
        dens.append(bob_den)
    return VPolytope(np.concatenate(nums), np.concatenate(dens), g)
