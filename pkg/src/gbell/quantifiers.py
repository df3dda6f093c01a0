"""Contextual, nonlocal and nonclassical fractions as exact linear programs.

Each fraction is ``1 - mu`` where ``mu`` is the largest total weight of a
sub-normalized mixture of "free" behaviors (noncontextual, local or
classical) that fits entrywise under the input behavior.  The certificate
records that mixture and the rescaled residual.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .behavior import (
    Behavior,
    alice_marginal,
    behavior_from_dict,
    behavior_to_dict,
    bob_marginal,
    consistency_conditions,
    product_behavior,
)
from .errors import FormatError, PreconditionError, ScenarioMismatchError, SignalingError
from .geometry.linalg import rank
from .geometry.lp import simplex_max
from .geometry.polytope import VPolytope
from .geometry.vertices import bob_nd_vertices, deterministic_vertices, local_vertices
from .scenario import FORMAT_VERSION, OUTCOMES, GeneralizedBellScenario

KINDS = ("CF", "NLF", "NClF")


@dataclass(frozen=True)
class FractionCertificate:
    """``input == sum(w * v for w, v in classical_part) + value * free_part``."""

    kind: str
    value: Fraction
    classical_part: tuple[tuple[Fraction, Behavior], ...]
    free_part: Behavior | None
    method: str = "lp"

    def reconstruct(self) -> tuple[Fraction, ...]:
        dim = len(self.classical_part[0][1].probs) if self.classical_part else len(self.free_part.probs)
        total = [Fraction(0)] * dim
        for w, v in self.classical_part:
            for i, p in enumerate(v.probs):
                if p:
                    total[i] += w * p
        if self.free_part is not None and self.value:
            for i, p in enumerate(self.free_part.probs):
                total[i] += self.value * p
        return tuple(total)

    def verify(self, b: Behavior) -> bool:
        if any(w < 0 for w, _ in self.classical_part):
            return False
        if sum(w for w, _ in self.classical_part) + self.value != 1:
            return False
        if self.free_part is not None and not self.free_part.is_nsnd:
            return False
        return self.reconstruct() == tuple(b.probs)


def _require_exact_nsnd(b: Behavior) -> None:
    if not b.exact:
        raise PreconditionError("fractions need an exact behavior; rationalize numerical behaviors first")
    if not b.is_nsnd:
        v = b.violations[0]
        raise PreconditionError(f"behavior violates a consistency condition ({v})")


@lru_cache(maxsize=32)
def _equality_rows(s) -> tuple[tuple[tuple[int, ...], ...], int]:
    rows = []
    for k in range(len(s.contexts)):
        r = [0] * s.dim
        for i in range(*s.context_slice(k).indices(s.dim)):
            r[i] = 1
        rows.append(tuple(r))
    for c in consistency_conditions(s):
        r = [0] * s.dim
        for i in c.plus:
            r[i] += 1
        for i in c.minus:
            r[i] -= 1
        rows.append(tuple(r))
    return tuple(rows), rank(rows, s.dim)


def _is_vertex(b: Behavior) -> bool:
    """Tight-rank test against the ND/NSND polytope of the behavior's scenario."""
    s = b.scenario
    rows, eq_rank = _equality_rows(s)
    zero = [i for i, p in enumerate(b.probs) if p == 0]
    # a vertex needs dim - rank(equalities) independent tight nonnegativity rows
    if len(zero) < s.dim - eq_rank:
        return False
    unit = [tuple(1 if j == i else 0 for j in range(s.dim)) for i in zero]
    return rank(list(rows) + unit, s.dim) == s.dim


def _is_deterministic(b: Behavior) -> bool:
    return all(p in (0, 1) for p in b.probs)


def _certificate(kind, b: Behavior, parts, method="lp") -> FractionCertificate:
    """Build a certificate from ``[(weight, behavior)]`` fitting under ``b``."""
    mu = sum((w for w, _ in parts), Fraction(0))
    value = 1 - mu
    free = None
    if value > 0:
        resid = list(b.probs)
        for w, v in parts:
            for i, p in enumerate(v.probs):
                if p:
                    resid[i] -= w * p
        free = Behavior(b.scenario, tuple(r / value for r in resid))
    return FractionCertificate(kind, value, tuple(parts), free, method)


def _vertex_form(kind: str, b: Behavior, vertices: VPolytope) -> FractionCertificate:
    """Maximize total weight of ``vertices`` fitting under ``b``."""
    p = b.probs
    support = np.array([x != 0 for x in p])
    num = vertices.numerators
    den = vertices.denominators
    # a vertex charging a coordinate where b vanishes must get weight zero
    ok = ~((num != 0) & ~support[None, :]).any(axis=1)
    cols = np.nonzero(ok)[0]
    if len(cols) == 0:
        return _certificate(kind, b, [], method="support")
    rows = np.nonzero(support)[0]
    # substitute w_j = den_j * u_j so that every coefficient is an integer
    A_ub = num[np.ix_(cols, rows)].T.tolist()
    b_ub = [p[i] for i in rows]
    c = [int(den[j]) for j in cols]
    res = simplex_max(c, A_ub=A_ub, b_ub=b_ub)
    parts = []
    for k, j in enumerate(cols):
        u = res.x[k]
        if u:
            parts.append((u * int(den[j]), vertices.behavior(int(j))))
    return _certificate(kind, b, parts)


def contextual_fraction(b: Behavior, vertices: VPolytope | None = None, *, shortcut: bool = True) -> FractionCertificate:
    """CF of a nondisturbing behavior on a contextuality scenario.

    ``shortcut=False`` skips the exact vertex test and always solves the LP.
    """
    if isinstance(b.scenario, GeneralizedBellScenario):
        raise ScenarioMismatchError("contextual_fraction takes Bob's behavior; use bob_marginal first")
    _require_exact_nsnd(b)
    if vertices is None:
        if shortcut and _is_vertex(b):
            if _is_deterministic(b):
                return _certificate("CF", b, [(Fraction(1), b)], method="vertex")
            return _certificate("CF", b, [], method="vertex")
        vertices = deterministic_vertices(b.scenario)
    return _vertex_form("CF", b, vertices)


def nonclassical_fraction(b: Behavior, vertices: VPolytope | None = None, *, shortcut: bool = True) -> FractionCertificate:
    if not isinstance(b.scenario, GeneralizedBellScenario):
        raise ScenarioMismatchError("nonclassical_fraction needs a generalized Bell behavior")
    _require_exact_nsnd(b)
    if vertices is None:
        if shortcut and _is_vertex(b):
            if _is_deterministic(b):
                return _certificate("NClF", b, [(Fraction(1), b)], method="vertex")
            return _certificate("NClF", b, [], method="vertex")
        vertices = deterministic_vertices(b.scenario)
    return _vertex_form("NClF", b, vertices)


def nonlocal_fraction(b: Behavior, bob_vertices: VPolytope | None = None, *, shortcut: bool = True) -> FractionCertificate:
    """NLF against the generalized-local set (Alice deterministic times Bob ND).

    Uses the vertex form when Bob's ND vertices are known (n-cycles, or
    passed in); otherwise a cone form over unnormalized Bob ND behaviors.
    """
    g = b.scenario
    if not isinstance(g, GeneralizedBellScenario):
        raise ScenarioMismatchError("nonlocal_fraction needs a generalized Bell behavior")
    _require_exact_nsnd(b)
    if shortcut and _is_vertex(b):
        if all(0 in pair for pair in alice_marginal(b)):
            return _certificate("NLF", b, [(Fraction(1), b)], method="vertex")
        return _certificate("NLF", b, [], method="vertex")
    if bob_vertices is None:
        try:
            bob_vertices = bob_nd_vertices(g.bob)
        except PreconditionError:
            return _cone_form_nlf(b)
    return _vertex_form("NLF", b, local_vertices(g, bob_vertices))


def _cone_form_nlf(b: Behavior) -> FractionCertificate:
    """NLF as ``max sum_alpha m_alpha`` over ``b >= sum_alpha delta_alpha (x) r_alpha``.

    ``r_alpha`` ranges over unnormalized Bob ND behaviors of mass ``m_alpha``.
    """
    g = b.scenario
    bob = g.bob
    nb = bob.dim
    alphas = list(itertools.product(OUTCOMES, repeat=g.n_alice))
    p = b.probs

    def target(x, kb, a, ob):
        k = g.joint_index(x, kb)
        return g.context_offsets[k] + (0 if a == 1 else nb_ctx[kb]) + ob

    nb_ctx = [2 ** len(c) for c in bob.contexts]
    bob_coords = [(kb, ob) for kb in range(len(bob.contexts)) for ob in range(nb_ctx[kb])]
    # variables that would charge a zero of b are fixed to zero and dropped
    var = {}
    for ai, alpha in enumerate(alphas):
        for j, (kb, ob) in enumerate(bob_coords):
            if all(p[target(x, kb, alpha[x], ob)] != 0 for x in range(g.n_alice)):
                var[(ai, j)] = len(var)
    nv = len(var)
    if nv == 0:
        return _certificate("NLF", b, [], method="support")
    A_ub = [[0] * nv for _ in range(g.dim)]
    for (ai, j), v in var.items():
        kb, ob = bob_coords[j]
        for x in range(g.n_alice):
            A_ub[target(x, kb, alphas[ai][x], ob)][v] = 1
    used = [i for i in range(g.dim) if any(A_ub[i])]
    A_ub = [A_ub[i] for i in used]
    b_ub = [p[i] for i in used]
    first = bob.context_slice(0)
    A_eq = []
    for ai in range(len(alphas)):
        # equal mass in every Bob context, and Bob's consistency conditions
        for kb in range(1, len(bob.contexts)):
            row = [0] * nv
            for j, (kb2, _) in enumerate(bob_coords):
                if (ai, j) in var and kb2 == kb:
                    row[var[(ai, j)]] += 1
                if (ai, j) in var and kb2 == 0:
                    row[var[(ai, j)]] -= 1
            A_eq.append(row)
        for cond in consistency_conditions(bob):
            row = [0] * nv
            for i in cond.plus:
                if (ai, i) in var:
                    row[var[(ai, i)]] += 1
            for i in cond.minus:
                if (ai, i) in var:
                    row[var[(ai, i)]] -= 1
            A_eq.append(row)
    A_eq = [r for r in A_eq if any(r)]
    c = [0] * nv
    for (ai, j), v in var.items():
        if first.start <= j < first.stop:
            c[v] = 1
    res = simplex_max(c, A_eq, [0] * len(A_eq), A_ub, b_ub)
    parts = []
    for ai, alpha in enumerate(alphas):
        r = [Fraction(0)] * nb
        for j in range(nb):
            if (ai, j) in var:
                r[j] = res.x[var[(ai, j)]]
        mass = sum(r[first])
        if mass == 0:
            continue
        q = Behavior(bob, tuple(v / mass for v in r))
        alice = [((Fraction(1), Fraction(0)) if a == 1 else (Fraction(0), Fraction(1))) for a in alpha]
        parts.append((mass, product_behavior(alice, q, g)))
    return _certificate("NLF", b, parts, method="cone-lp")


@dataclass(frozen=True)
class TradeoffReport:
    nlf: Fraction
    cf: Fraction
    nclf: Fraction
    certificates: tuple[FractionCertificate, ...]

    @property
    def holds(self) -> bool:
        return self.nlf + self.cf <= self.nclf

    def as_dict(self) -> dict:
        return {
            "NLF": str(self.nlf),
            "CF": str(self.cf),
            "NClF": str(self.nclf),
            "holds": self.holds,
        }


def check_quantifier_tradeoff(b: Behavior, bob_vertices: VPolytope | None = None) -> TradeoffReport:
    """Compute NLF, CF of Bob's marginal and NClF; report whether NLF + CF <= NClF."""
    if not isinstance(b.scenario, GeneralizedBellScenario):
        raise ScenarioMismatchError("the trade-off is defined for generalized Bell behaviors")
    _require_exact_nsnd(b)
    try:
        marg = bob_marginal(b)
    except SignalingError as exc:
        raise PreconditionError(str(exc)) from None
    nlf = nonlocal_fraction(b, bob_vertices)
    cf = contextual_fraction(marg)
    nclf = nonclassical_fraction(b)
    return TradeoffReport(nlf.value, cf.value, nclf.value, (nlf, cf, nclf))


# -- certificate files ------------------------------------------------------------------

def certificate_to_dict(c: FractionCertificate) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "fraction-certificate",
        "quantifier": c.kind,
        "value": str(c.value),
        "method": c.method,
        "classical_part": [
            {"weight": str(w), "vertex": [str(p) for p in v.probs]} for w, v in c.classical_part
        ],
        "free_part": behavior_to_dict(c.free_part) if c.free_part is not None else None,
    }


def certificate_from_dict(d: dict, scenario) -> FractionCertificate:
    if d.get("kind") != "fraction-certificate" or d.get("format_version") != FORMAT_VERSION:
        raise FormatError("not a fraction certificate of a supported version")
    if d["quantifier"] not in KINDS:
        raise FormatError(f"unknown quantifier {d['quantifier']!r}")
    parts = tuple(
        (Fraction(e["weight"]), Behavior(scenario, tuple(Fraction(x) for x in e["vertex"])))
        for e in d["classical_part"]
    )
    free = behavior_from_dict(d["free_part"]) if d["free_part"] is not None else None
    return FractionCertificate(d["quantifier"], Fraction(d["value"]), parts, free, d.get("method", "lp"))


def dump_certificate(c: FractionCertificate, path) -> None:
    Path(path).write_text(json.dumps(certificate_to_dict(c), indent=2) + "\n")
