"""Contextuality scenarios and their bipartite composition.

A scenario is a list of dichotomic measurements together with the maximal
sets of them that can be performed jointly (contexts).  Behaviors are stored
as flat vectors whose coordinates follow the canonical ordering defined here:
contexts in scenario order, outcome tuples in lexicographic order with +1
before -1.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .errors import FormatError, InvalidScenarioError, UnsupportedCompositionError

OUTCOMES = (1, -1)
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Measurement:
    id: str
    outcomes: tuple[int, ...] = OUTCOMES

    def __post_init__(self):
        if len(self.outcomes) < 2:
            raise InvalidScenarioError(f"measurement {self.id} needs at least two outcomes")
        if tuple(self.outcomes) != OUTCOMES:
            raise InvalidScenarioError("only dichotomic +1/-1 measurements are supported")


class _ContextStructure:
    """Coordinate bookkeeping shared by both scenario kinds."""

    contexts: tuple[tuple[str, ...], ...]

    @cached_property
    def coordinates(self) -> tuple[tuple[int, tuple[int, ...]], ...]:
        coords = []
        for k, ctx in enumerate(self.contexts):
            for out in itertools.product(OUTCOMES, repeat=len(ctx)):
                coords.append((k, out))
        return tuple(coords)

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    @cached_property
    def context_offsets(self) -> tuple[int, ...]:
        offsets, pos = [], 0
        for ctx in self.contexts:
            offsets.append(pos)
            pos += 2 ** len(ctx)
        return tuple(offsets)

    def context_slice(self, k: int) -> slice:
        start = self.context_offsets[k]
        return slice(start, start + 2 ** len(self.contexts[k]))

    def index(self, k: int, outcome: tuple[int, ...]) -> int:
        """Flat coordinate of outcome tuple ``outcome`` in context ``k``."""
        pos = 0
        for s in outcome:
            pos = 2 * pos + (0 if s == 1 else 1)
        return self.context_offsets[k] + pos

    def contexts_containing(self, subset) -> list[int]:
        subset = set(subset)
        return [k for k, ctx in enumerate(self.contexts) if subset <= set(ctx)]

    @property
    def measurement_ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.measurements)


@dataclass(frozen=True, eq=True)
class ContextualityScenario(_ContextStructure):
    measurements: tuple[Measurement, ...]
    contexts: tuple[tuple[str, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        ids = [m.id for m in self.measurements]
        if len(set(ids)) != len(ids):
            raise InvalidScenarioError("measurement labels must be unique")
        known = set(ids)
        seen = set()
        for ctx in self.contexts:
            if not ctx:
                raise InvalidScenarioError("empty context")
            if len(set(ctx)) != len(ctx):
                raise InvalidScenarioError(f"repeated measurement in context {ctx}")
            if not set(ctx) <= known:
                raise InvalidScenarioError(f"context {ctx} uses unknown measurements")
            key = frozenset(ctx)
            if key in seen:
                raise InvalidScenarioError(f"duplicate context {ctx}")
            seen.add(key)
        for a, b in itertools.permutations(self.contexts, 2):
            if set(a) < set(b):
                raise InvalidScenarioError(f"context {a} is not maximal (contained in {b})")
        used = set().union(*map(set, self.contexts)) if self.contexts else set()
        missing = known - used
        if missing:
            raise InvalidScenarioError(f"measurements {sorted(missing)} belong to no context")

    def neighbors(self, mid: str) -> set[str]:
        out = set()
        for ctx in self.contexts:
            if mid in ctx:
                out.update(ctx)
        out.discard(mid)
        return out


def _dichotomic(ids) -> tuple[Measurement, ...]:
    return tuple(Measurement(i) for i in ids)


def n_cycle(n: int) -> ContextualityScenario:
    """Bob's n-cycle: measurements B0..B{n-1}, contexts {B_i, B_{i+1 mod n}}."""
    if n < 3:
        raise InvalidScenarioError(f"n-cycle needs n >= 3, got {n}")
    ids = [f"B{i}" for i in range(n)]
    contexts = tuple((ids[i], ids[(i + 1) % n]) for i in range(n))
    return ContextualityScenario(_dichotomic(ids), contexts, name=f"{n}-cycle")


def pm_label(row: int, col: int) -> str:
    return f"B{row}{col}"


def peres_mermin() -> ContextualityScenario:
    """Peres-Mermin square with its three rows and three columns as contexts.

    ``B{r}{c}`` sits in row ``r`` and column ``c`` (1-based).  Rows come first
    in the context list.
    """
    ids = [pm_label(r, c) for r in (1, 2, 3) for c in (1, 2, 3)]
    rows = [tuple(pm_label(r, c) for c in (1, 2, 3)) for r in (1, 2, 3)]
    cols = [tuple(pm_label(r, c) for r in (1, 2, 3)) for c in (1, 2, 3)]
    return ContextualityScenario(_dichotomic(ids), tuple(rows + cols), name="peres-mermin")


def alice_side(m: int) -> ContextualityScenario:
    """``m`` mutually incompatible dichotomic measurements A0..A{m-1}."""
    if m < 1:
        raise InvalidScenarioError(f"Alice needs at least one measurement, got {m}")
    ids = [f"A{x}" for x in range(m)]
    return ContextualityScenario(_dichotomic(ids), tuple((i,) for i in ids), name=f"alice-{m}")


@dataclass(frozen=True, eq=True)
class GeneralizedBellScenario(_ContextStructure):
    """Alice (one measurement per round) composed with Bob's contextuality scenario.

    The joint contexts are ``(A_x,) + C_B`` ordered by Alice index first, then
    by Bob's context index.
    """

    alice: ContextualityScenario
    bob: ContextualityScenario

    def __post_init__(self):
        if any(len(c) != 1 for c in self.alice.contexts):
            raise UnsupportedCompositionError("Alice's scenario must have singleton contexts only")
        if set(self.alice.measurement_ids) & set(self.bob.measurement_ids):
            raise UnsupportedCompositionError("Alice and Bob measurement labels overlap")

    @cached_property
    def joint_contexts(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (x, kb) for x in range(len(self.alice.measurements)) for kb in range(len(self.bob.contexts))
        )

    @cached_property
    def contexts(self) -> tuple[tuple[str, ...], ...]:
        return tuple(
            (self.alice.measurements[x].id,) + self.bob.contexts[kb] for x, kb in self.joint_contexts
        )

    @property
    def measurements(self) -> tuple[Measurement, ...]:
        return self.alice.measurements + self.bob.measurements

    @property
    def n_alice(self) -> int:
        return len(self.alice.measurements)

    def joint_index(self, x: int, kb: int) -> int:
        return x * len(self.bob.contexts) + kb

    @property
    def name(self) -> str:
        return f"{self.alice.name}x{self.bob.name}"


def generalized_bell(alice: ContextualityScenario, bob: ContextualityScenario) -> GeneralizedBellScenario:
    return GeneralizedBellScenario(alice, bob)


Scenario = ContextualityScenario | GeneralizedBellScenario


# -- scenario files -----------------------------------------------------------

def _scenario_dict(s: ContextualityScenario) -> dict:
    return {
        "name": s.name,
        "measurements": [m.id for m in s.measurements],
        "contexts": [list(c) for c in s.contexts],
    }


def scenario_to_dict(s: Scenario) -> dict:
    if isinstance(s, GeneralizedBellScenario):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "generalized-bell",
            "alice": _scenario_dict(s.alice),
            "bob": _scenario_dict(s.bob),
        }
    return {"format_version": FORMAT_VERSION, "kind": "contextuality", **_scenario_dict(s)}


def _scenario_from_part(d: dict) -> ContextualityScenario:
    try:
        return ContextualityScenario(
            _dichotomic(d["measurements"]), tuple(tuple(c) for c in d["contexts"]), name=d.get("name", "")
        )
    except KeyError as exc:
        raise FormatError(f"scenario entry is missing field {exc}") from None


def scenario_from_dict(d: dict) -> Scenario:
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported scenario format_version {version!r}")
    kind = d.get("kind")
    if kind == "generalized-bell":
        return generalized_bell(_scenario_from_part(d["alice"]), _scenario_from_part(d["bob"]))
    if kind == "contextuality":
        return _scenario_from_part(d)
    raise FormatError(f"unknown scenario kind {kind!r}")


def dump_scenario(s: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n")


def load_scenario(path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return scenario_from_dict(data)
