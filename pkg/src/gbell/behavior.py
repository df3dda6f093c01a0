"""Behaviors: one probability distribution per context.

Entries are exact :class:`fractions.Fraction` values unless a behavior was
produced numerically (see :mod:`gbell.quantum`), in which case they are floats
and every check takes a tolerance.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import prod
from numbers import Rational
from pathlib import Path

from .errors import (
    ConditioningOnNullError,
    FormatError,
    IncompatibleSetError,
    InvalidMixtureError,
    InvalidProbabilityError,
    NormalizationError,
    NotABehaviorError,
    ScenarioMismatchError,
    SignalingError,
)
from .scenario import (
    FORMAT_VERSION,
    OUTCOMES,
    GeneralizedBellScenario,
    Scenario,
    scenario_from_dict,
    scenario_to_dict,
)

FLOAT_TOL = 1e-12

CorrelatorSpec = dict  # frozenset[str] -> Fraction


def as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"expected an exact rational, got {type(v).__name__}")


# -- consistency conditions -----------------------------------------------------

@dataclass(frozen=True)
class ConsistencyCondition:
    """Marginal of context ``left`` on ``shared`` equals that of ``right``."""

    kind: str
    left: int
    right: int
    shared: tuple[str, ...]
    outcome: tuple[int, ...]
    plus: tuple[int, ...]
    minus: tuple[int, ...]

    def residual(self, probs):
        return sum(probs[i] for i in self.plus) - sum(probs[i] for i in self.minus)


def _condition_kind(scenario: Scenario, shared) -> str:
    if not isinstance(scenario, GeneralizedBellScenario):
        return "disturbance"
    alice_ids = set(scenario.alice.measurement_ids)
    has_alice = any(m in alice_ids for m in shared)
    has_bob = any(m not in alice_ids for m in shared)
    if has_alice and has_bob:
        return "bob-disturbance"
    if has_alice:
        return "signaling-to-alice"
    return "signaling-to-bob"


def consistency_conditions(scenario: Scenario) -> list[ConsistencyCondition]:
    """Shared-marginal equalities for every pair of overlapping contexts."""
    out = []
    ctxs = scenario.contexts
    for k1, k2 in itertools.combinations(range(len(ctxs)), 2):
        shared = tuple(m for m in ctxs[k1] if m in ctxs[k2])
        if not shared:
            continue
        pos1 = [ctxs[k1].index(m) for m in shared]
        pos2 = [ctxs[k2].index(m) for m in shared]
        kind = _condition_kind(scenario, shared)
        for s in itertools.product(OUTCOMES, repeat=len(shared)):
            plus = tuple(
                scenario.index(k1, o)
                for o in itertools.product(OUTCOMES, repeat=len(ctxs[k1]))
                if tuple(o[p] for p in pos1) == s
            )
            minus = tuple(
                scenario.index(k2, o)
                for o in itertools.product(OUTCOMES, repeat=len(ctxs[k2]))
                if tuple(o[p] for p in pos2) == s
            )
            out.append(ConsistencyCondition(kind, k1, k2, shared, s, plus, minus))
    return out


@dataclass(frozen=True)
class Violation:
    condition: ConsistencyCondition
    residual: object

    def __str__(self):
        c = self.condition
        return (
            f"{c.kind}: contexts {c.left} vs {c.right} on {'/'.join(c.shared)}={c.outcome} "
            f"residual {self.residual}"
        )


# -- the behavior value -----------------------------------------------------------

@dataclass(frozen=True)
class Behavior:
    scenario: Scenario
    probs: tuple

    @property
    def exact(self) -> bool:
        return all(isinstance(p, Fraction) for p in self.probs)

    def distribution(self, k: int) -> tuple:
        return self.probs[self.scenario.context_slice(k)]

    def __getitem__(self, key):
        k, outcome = key
        return self.probs[self.scenario.index(k, tuple(outcome))]

    def __len__(self):
        return len(self.probs)

    @cached_property
    def violations(self) -> tuple[Violation, ...]:
        return tuple(check_nsnd(self))

    @property
    def is_nsnd(self) -> bool:
        return not self.violations

    def to_floats(self) -> tuple[float, ...]:
        return tuple(float(p) for p in self.probs)


def _validate(scenario: Scenario, probs, tol) -> None:
    if len(probs) != scenario.dim:
        raise ValueError(f"expected {scenario.dim} entries, got {len(probs)}")
    for i, p in enumerate(probs):
        if p < -tol:
            k, o = scenario.coordinates[i]
            raise InvalidProbabilityError(f"negative probability {p} in context {k}, outcome {o}")
    for k in range(len(scenario.contexts)):
        total = sum(probs[scenario.context_slice(k)])
        if abs(total - 1) > tol:
            raise NormalizationError(f"context {scenario.contexts[k]} sums to {total}")


def behavior_from_table(scenario: Scenario, entries, *, exact: bool = True, tol: float = FLOAT_TOL) -> Behavior:
    """Validated behavior from a flat list in canonical coordinate order.

    Exact tables accept ints, Fractions and "p/q" strings.  With
    ``exact=False`` the entries are kept as floats and validated to ``tol``.
    """
    if exact:
        probs = tuple(as_fraction(v) for v in entries)
        _validate(scenario, probs, 0)
    else:
        probs = tuple(float(v) for v in entries)
        _validate(scenario, probs, tol)
    return Behavior(scenario, probs)


def check_nsnd(b: Behavior, tol: float | None = None) -> list[Violation]:
    """Every violated shared-marginal equality, with its residual."""
    if tol is None:
        tol = 0 if b.exact else FLOAT_TOL
    out = []
    for cond in consistency_conditions(b.scenario):
        r = cond.residual(b.probs)
        if abs(r) > tol:
            out.append(Violation(cond, r))
    return out


def uniform_behavior(scenario: Scenario) -> Behavior:
    probs = []
    for ctx in scenario.contexts:
        probs.extend([Fraction(1, 2 ** len(ctx))] * 2 ** len(ctx))
    return Behavior(scenario, tuple(probs))


def deterministic_behavior(scenario: Scenario, assignment: dict) -> Behavior:
    """Behavior of a global +-1 assignment ``{measurement id: outcome}``."""
    probs = [Fraction(0)] * scenario.dim
    for k, ctx in enumerate(scenario.contexts):
        probs[scenario.index(k, tuple(assignment[m] for m in ctx))] = Fraction(1)
    return Behavior(scenario, tuple(probs))


# -- marginals and correlators -------------------------------------------------------

def _close(a, b, exact, tol):
    return a == b if exact else abs(a - b) <= tol


def bob_marginal(b: Behavior, tol: float = FLOAT_TOL) -> Behavior:
    """Bob's behavior, summing Alice's outcome out.

    Raises :class:`SignalingError` if the result depends on Alice's setting.
    """
    g = b.scenario
    if not isinstance(g, GeneralizedBellScenario):
        raise ScenarioMismatchError("bob_marginal needs a generalized Bell behavior")
    bob = g.bob
    probs = []
    for kb, ctx in enumerate(bob.contexts):
        per_x = []
        for x in range(g.n_alice):
            k = g.joint_index(x, kb)
            per_x.append(
                [sum(b[k, (a,) + o] for a in OUTCOMES) for o in itertools.product(OUTCOMES, repeat=len(ctx))]
            )
        for x in range(1, g.n_alice):
            if not all(_close(u, v, b.exact, tol) for u, v in zip(per_x[0], per_x[x])):
                raise SignalingError(f"Bob's marginal on {ctx} depends on Alice's setting (x=0 vs x={x})")
        probs.extend(per_x[0])
    return Behavior(bob, tuple(probs))


def alice_marginal(b: Behavior, tol: float = FLOAT_TOL) -> list[tuple]:
    """``[(p_x(+1), p_x(-1)) for each x]``."""
    g = b.scenario
    if not isinstance(g, GeneralizedBellScenario):
        raise ScenarioMismatchError("alice_marginal needs a generalized Bell behavior")
    out = []
    for x in range(g.n_alice):
        per_ctx = []
        for kb in range(len(g.bob.contexts)):
            d = b.distribution(g.joint_index(x, kb))
            half = len(d) // 2
            per_ctx.append((sum(d[:half]), sum(d[half:])))
        for pair in per_ctx[1:]:
            if not all(_close(u, v, b.exact, tol) for u, v in zip(per_ctx[0], pair)):
                raise SignalingError(f"Alice's marginal for A{x} depends on Bob's context")
        out.append(per_ctx[0])
    return out


def _subset_key(subset) -> frozenset:
    if isinstance(subset, str):
        subset = subset.split()
    return frozenset(subset)


def correlator(b: Behavior, subset):
    """Expectation of the product of the +-1 outcomes of ``subset``."""
    key = _subset_key(subset)
    ks = b.scenario.contexts_containing(key)
    if not ks:
        raise IncompatibleSetError(f"{sorted(key)} is not contained in any context")
    k = ks[0]
    ctx = b.scenario.contexts[k]
    pos = [i for i, m in enumerate(ctx) if m in key]
    total = 0
    for o, p in zip(itertools.product(OUTCOMES, repeat=len(ctx)), b.distribution(k)):
        total += prod(o[i] for i in pos) * p
    return total


def make_spec(mapping) -> CorrelatorSpec:
    """Correlator spec from ``{"A0 B11": 1, ("B0", "B1"): "-1/2", ...}``."""
    spec = {}
    for key, val in mapping.items():
        k = _subset_key(key)
        v = as_fraction(val)
        if not -1 <= v <= 1:
            raise ValueError(f"correlator {sorted(k)} = {v} outside [-1, 1]")
        spec[k] = v
    return spec


def behavior_from_correlators(scenario: Scenario, spec) -> Behavior:
    """Behavior whose context distributions expand the given correlators.

    For a context of ``k`` dichotomic measurements,
    ``p(s) = 2**-k * sum over subsets S of prod(s_M, M in S) * <S>`` with
    ``<empty> = 1`` and unspecified correlators taken as zero.
    """
    spec = make_spec(spec) if not all(isinstance(k, frozenset) for k in spec) else spec
    for key in spec:
        if key and not scenario.contexts_containing(key):
            raise IncompatibleSetError(f"{sorted(key)} is not contained in any context")
    probs = []
    for k, ctx in enumerate(scenario.contexts):
        subsets = [
            (pos, spec.get(frozenset(ctx[i] for i in pos), Fraction(0)))
            for r in range(1, len(ctx) + 1)
            for pos in itertools.combinations(range(len(ctx)), r)
        ]
        subsets = [(pos, v) for pos, v in subsets if v != 0]
        scale = Fraction(1, 2 ** len(ctx))
        for o in itertools.product(OUTCOMES, repeat=len(ctx)):
            total = 1 + sum(prod(o[i] for i in pos) * v for pos, v in subsets)
            p = scale * total
            if p < 0:
                raise NotABehaviorError(
                    f"negative probability {p} in context {ctx}, outcome {o}", context=ctx, outcome=o, value=p
                )
            probs.append(p)
    return Behavior(scenario, tuple(probs))


def correlators_of(b: Behavior) -> CorrelatorSpec:
    """All nonzero correlators of subsets of contexts."""
    spec = {}
    for ctx in b.scenario.contexts:
        for r in range(1, len(ctx) + 1):
            for sub in itertools.combinations(ctx, r):
                key = frozenset(sub)
                if key not in spec:
                    spec[key] = correlator(b, key)
    return {k: v for k, v in spec.items() if v != 0}


# -- derived behaviors -------------------------------------------------------------------

def conditional_behavior(b: Behavior, x: int, a: int) -> Behavior:
    """Bob's behavior conditioned on Alice measuring ``A_x`` with outcome ``a``."""
    g = b.scenario
    if not isinstance(g, GeneralizedBellScenario):
        raise ScenarioMismatchError("conditional_behavior needs a generalized Bell behavior")
    if a not in OUTCOMES:
        raise ValueError(f"outcome must be +1 or -1, got {a}")
    px = alice_marginal(b)[x][0 if a == 1 else 1]
    if px == 0 or (not b.exact and abs(px) <= FLOAT_TOL):
        raise ConditioningOnNullError(f"p(A{x} = {a:+d}) = 0")
    probs = []
    for kb, ctx in enumerate(g.bob.contexts):
        k = g.joint_index(x, kb)
        for o in itertools.product(OUTCOMES, repeat=len(ctx)):
            probs.append(b[k, (a,) + o] / px)
    return Behavior(g.bob, tuple(probs))


def product_behavior(alice_probs, bob: Behavior, scenario: GeneralizedBellScenario | None = None) -> Behavior:
    """``p(a, b | x, C) = p_x(a) * q_C(b)`` for ``alice_probs[x] = (p_x(+1), p_x(-1))``."""
    from .scenario import alice_side, generalized_bell

    g = scenario or generalized_bell(alice_side(len(alice_probs)), bob.scenario)
    if g.bob != bob.scenario or g.n_alice != len(alice_probs):
        raise ScenarioMismatchError("product_behavior scenario does not match its factors")
    probs = []
    for x, kb in g.joint_contexts:
        d = bob.distribution(kb)
        for ai, a in enumerate(OUTCOMES):
            probs.extend(alice_probs[x][ai] * q for q in d)
    return Behavior(g, tuple(probs))


def mix(behaviors, weights) -> Behavior:
    behaviors = list(behaviors)
    weights = [w if isinstance(w, float) else as_fraction(w) for w in weights]
    if not behaviors or len(behaviors) != len(weights):
        raise InvalidMixtureError("need one weight per behavior")
    if any(w < 0 for w in weights):
        raise InvalidMixtureError("weights must be nonnegative")
    total = sum(weights)
    if (total != 1) if all(isinstance(w, Fraction) for w in weights) else abs(total - 1) > FLOAT_TOL:
        raise InvalidMixtureError(f"weights sum to {total}, not 1")
    s = behaviors[0].scenario
    if any(b.scenario != s for b in behaviors):
        raise InvalidMixtureError("all behaviors must share one scenario")
    probs = tuple(sum(w * b.probs[i] for w, b in zip(weights, behaviors)) for i in range(s.dim))
    return Behavior(s, probs)


# -- files ------------------------------------------------------------------------------------

def behavior_to_dict(b: Behavior) -> dict:
    s = b.scenario
    contexts = []
    for k, ctx in enumerate(s.contexts):
        dist = {
            " ".join(f"{o:+d}" for o in out): str(p)
            for out, p in zip(itertools.product(OUTCOMES, repeat=len(ctx)), b.distribution(k))
        }
        contexts.append({"context": list(ctx), "probabilities": dist})
    return {
        "format_version": FORMAT_VERSION,
        "kind": "behavior",
        "scenario": scenario_to_dict(s),
        "contexts": contexts,
    }


def behavior_from_dict(d: dict) -> Behavior:
    if d.get("format_version") != FORMAT_VERSION or d.get("kind") != "behavior":
        raise FormatError("not a behavior file of a supported version")
    s = scenario_from_dict(d["scenario"])
    if len(d["contexts"]) != len(s.contexts):
        raise FormatError("context count does not match scenario")
    entries = []
    for k, (ctx, block) in enumerate(zip(s.contexts, d["contexts"])):
        if tuple(block["context"]) != ctx:
            raise FormatError(f"context {k} is {block['context']}, expected {list(ctx)}")
        dist = block["probabilities"]
        for out in itertools.product(OUTCOMES, repeat=len(ctx)):
            entries.append(Fraction(dist.get(" ".join(f"{o:+d}" for o in out), "0")))
    return behavior_from_table(s, entries)


def dump_behavior(b: Behavior, path) -> None:
    Path(path).write_text(json.dumps(behavior_to_dict(b), indent=2) + "\n")


def load_behavior(path) -> Behavior:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return behavior_from_dict(data)


def correlators_csv(b: Behavior) -> str:
    """CSV table ``subset,value`` of every correlator of a context subset."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["subset", "value"])
    seen = set()
    for ctx in b.scenario.contexts:
        for r in range(1, len(ctx) + 1):
            for sub in itertools.combinations(ctx, r):
                key = frozenset(sub)
                if key in seen:
                    continue
                seen.add(key)
                w.writerow([" ".join(sub), str(correlator(b, key))])
    return buf.getvalue()
