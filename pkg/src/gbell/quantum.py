"""Behaviors from density operators and commuting projective measurements.

Arithmetic is complex double precision.  ``rationalize`` turns a generated
float behavior into an exact member of the NSND polytope so that the exact
LP tools can be applied to it.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .behavior import Behavior, bob_marginal, check_nsnd, conditional_behavior, correlator
from .errors import FormatError, IncompatibleContextError, InvalidProbabilityError, ScenarioMismatchError
from .geometry.linalg import independent_rows, solve_square
from .geometry.polytope import nd_hrep
from .scenario import (
    OUTCOMES,
    GeneralizedBellScenario,
    Scenario,
    alice_side,
    generalized_bell,
    n_cycle,
    scenario_from_dict,
    scenario_to_dict,
)

STATE_TOL = 1e-12
COMMUTATION_TOL = 1e-10
RATIONAL_TOL = 1e-12
FORMAT_VERSION = 1


def _hermitian(m: np.ndarray, tol: float) -> bool:
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, atol=tol, rtol=0)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if not _hermitian(m, STATE_TOL):
            raise ValueError("density operator must be a square Hermitian matrix")
        if abs(np.trace(m) - 1) > STATE_TOL:
            raise ValueError(f"trace is {np.trace(m).real:.15g}, not 1")
        lo = np.linalg.eigvalsh(m).min()
        if lo < -STATE_TOL:
            raise ValueError(f"negative eigenvalue {lo:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, vector) -> DensityOperator:
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dimension: int) -> DensityOperator:
        return cls(np.eye(dimension, dtype=complex) / dimension)

    def expectation(self, op: np.ndarray) -> float:
        return float(np.trace(self.matrix @ op).real)

    def with_noise(self, visibility: float) -> DensityOperator:
        """``v rho + (1 - v) I/d``."""
        if not 0 <= visibility <= 1:
            raise ValueError("visibility must lie in [0, 1]")
        d = self.dimension
        return DensityOperator(visibility * self.matrix + (1 - visibility) * np.eye(d) / d)


@dataclass(frozen=True, eq=False)
class DichotomicObservable:
    """A +-1 valued observable, stored as the projector onto its +1 eigenspace."""

    projector: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.projector, dtype=complex)
        if not _hermitian(p, STATE_TOL):
            raise ValueError("projector must be a square Hermitian matrix")
        if not np.allclose(p @ p, p, atol=STATE_TOL, rtol=0):
            raise ValueError("projector is not idempotent")
        p.setflags(write=False)
        object.__setattr__(self, "projector", p)

    @classmethod
    def from_operator(cls, op) -> DichotomicObservable:
        op = np.asarray(op, dtype=complex)
        return cls((op + np.eye(op.shape[0])) / 2)

    @classmethod
    def from_vector(cls, vector) -> DichotomicObservable:
        """``2|v><v| - I``."""
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @property
    def dimension(self) -> int:
        return self.projector.shape[0]

    @property
    def operator(self) -> np.ndarray:
        return 2 * self.projector - np.eye(self.dimension)

    def outcome_projector(self, outcome: int) -> np.ndarray:
        if outcome == 1:
            return self.projector
        if outcome == -1:
            return np.eye(self.dimension) - self.projector
        raise ValueError(f"outcome must be +1 or -1, got {outcome}")


@dataclass(frozen=True, eq=False)
class QuantumSetup:
    state: DensityOperator
    alice: tuple[DichotomicObservable, ...]
    bob: tuple[DichotomicObservable, ...]
    scenario: Scenario

    def behavior(self) -> Behavior:
        return behavior_from_state(self.state, self.alice, self.bob, self.scenario)


# -- the pentagon construction ----------------------------------------------------------

def pentagon_cos2() -> float:
    c = math.cos(math.pi / 5)
    return c / (1 + c)


def pentagon_vectors() -> list[np.ndarray]:
    """``|v_j> = cos t |0> + sin t cos(4 pi j/5) |1> + sin t sin(4 pi j/5) |2>``.

    Index ``k`` of the returned list is ``j = k`` (mod 5), so 1-based
    ``j = 1..5`` lands on ``B_1..B_4, B_0``.
    """
    ct = math.sqrt(pentagon_cos2())
    st = math.sqrt(1 - pentagon_cos2())
    out = []
    for k in range(5):
        phi = 4 * math.pi * k / 5
        out.append(np.array([ct, st * math.cos(phi), st * math.sin(phi)], dtype=complex))
    return out


def pentagon_setup() -> QuantumSetup:
    """Qubit-qutrit separable state with ``A = sigma_z`` and five pentagon observables.

    ``rho = 1/2 |0><0| (x) |0><0| + 1/2 |1><1| (x) |2><2|``.
    """
    e = np.eye(3)
    rho = 0.5 * np.kron(np.diag([1, 0]), np.outer(e[0], e[0])) + 0.5 * np.kron(np.diag([0, 1]), np.outer(e[2], e[2]))
    sz = np.diag([1.0, -1.0])
    return QuantumSetup(
        DensityOperator(rho),
        (DichotomicObservable.from_operator(sz),),
        tuple(DichotomicObservable.from_vector(v) for v in pentagon_vectors()),
        generalized_bell(alice_side(1), n_cycle(5)),
    )


# -- generation -------------------------------------------------------------------------

def _context_projectors(obs, ids, ctx):
    ops = [obs[ids.index(m)] for m in ctx]
    for (i, p), (j, q) in itertools.combinations(enumerate(ops), 2):
        comm = p.projector @ q.projector - q.projector @ p.projector
        if np.abs(comm).max() > COMMUTATION_TOL:
            raise IncompatibleContextError(f"{ctx[i]} and {ctx[j]} do not commute (|[P, Q]| = {np.abs(comm).max():.3g})")
    out = []
    for o in itertools.product(OUTCOMES, repeat=len(ops)):
        m = np.eye(ops[0].dimension, dtype=complex)
        for op, v in zip(ops, o):
            m = m @ op.outcome_projector(v)
        out.append(m)
    return out


def behavior_from_state(state: DensityOperator, alice, bob, scenario: Scenario) -> Behavior:
    """Float behavior ``p(a, b | x, C) = Tr[rho (P^A_a (x) prod_i P^B_{b_i})]``.

    For a plain contextuality scenario pass ``alice=()``; Bob's observables
    then act on the whole space.
    """
    alice, bob = tuple(alice), tuple(bob)
    bob_s = scenario.bob if isinstance(scenario, GeneralizedBellScenario) else scenario
    if len(bob) != len(bob_s.measurement_ids):
        raise ScenarioMismatchError(f"{len(bob)} observables for {len(bob_s.measurement_ids)} measurements")
    if isinstance(scenario, GeneralizedBellScenario) and len(alice) != scenario.n_alice:
        raise ScenarioMismatchError(f"{len(alice)} Alice observables for {scenario.n_alice} settings")
    dims = {o.dimension for o in bob}
    if len(dims) != 1:
        raise ValueError("Bob's observables act on different dimensions")
    d_bob = dims.pop()
    d_alice = alice[0].dimension if alice else 1
    if state.dimension != d_alice * d_bob:
        raise ValueError(f"state dimension {state.dimension} != {d_alice} x {d_bob}")

    ids = list(bob_s.measurement_ids)
    bob_proj = [_context_projectors(bob, ids, ctx) for ctx in bob_s.contexts]
    probs: list[float] = []
    if isinstance(scenario, GeneralizedBellScenario):
        for x, kb in scenario.joint_contexts:
            for a in OUTCOMES:
                pa = alice[x].outcome_projector(a)
                probs.extend(state.expectation(np.kron(pa, q)) for q in bob_proj[kb])
    else:
        for block in bob_proj:
            probs.extend(state.expectation(q) for q in block)
    probs = [0.0 if abs(p) < 1e-15 else p for p in probs]
    if min(probs) < -STATE_TOL:
        raise InvalidProbabilityError(f"negative probability {min(probs):.3g}")
    b = Behavior(scenario, tuple(probs))
    bad = check_nsnd(b, STATE_TOL)
    if bad:
        raise ValueError(f"generated behavior violates NSND: {bad[0]}")
    return b


# -- evaluation -------------------------------------------------------------------------

def _pentagon_scenario() -> GeneralizedBellScenario:
    return generalized_bell(alice_side(1), n_cycle(5))


def classicality_value(b: Behavior) -> float:
    """``3<A> + sum_j (<B_j B_j+1> + <A B_j B_j+1>)``; classically ``>= -3``."""
    if b.scenario != _pentagon_scenario():
        raise ScenarioMismatchError("classicality_value needs alice_side(1) x n_cycle(5)")
    a = b.scenario.alice.measurement_ids[0]
    total = 3 * correlator(b, (a,))
    for ctx in b.scenario.bob.contexts:
        total += correlator(b, ctx) + correlator(b, (a,) + ctx)
    return total


def conditional_pentagon_value(b: Behavior, a: int = 1) -> float:
    """``sum_j <B_j B_j+1>`` of Bob's behavior given Alice's outcome ``a``."""
    q = conditional_behavior(b, 0, a)
    return sum(correlator(q, ctx) for ctx in q.scenario.contexts)


# -- rationalization --------------------------------------------------------------------

def rational_approximation(x: float, tol: float = RATIONAL_TOL) -> Fraction:
    """First continued-fraction convergent within ``tol`` of ``x``."""
    target = Fraction(x)
    h0, h1, k0, k1 = 0, 1, 1, 0
    rest = target
    while True:
        a = math.floor(rest)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        approx = Fraction(h1, k1)
        if abs(approx - target) <= tol or approx == target:
            return approx
        rest = 1 / (rest - a)


@dataclass(frozen=True)
class Rationalized:
    behavior: Behavior
    radius: float  # max |exact - float| over all entries
    repaired: bool


def _project(s: Scenario, probs: list[Fraction]) -> tuple[list[Fraction], bool]:
    """Least-norm correction on the support of ``probs`` onto ``E p = e``."""
    h = nd_hrep(s)
    residual = [e - sum(c * p for c, p in zip(a, probs)) for a, e in h.equalities]
    if not any(residual):
        return probs, False
    support = [i for i, p in enumerate(probs) if p != 0]
    rows = [[a[i] for i in support] for a, _ in h.equalities]
    keep = independent_rows(rows)
    E = [rows[r] for r in keep]
    r = [residual[k] for k in keep]
    gram = [[sum(u * v for u, v in zip(ri, rj)) for rj in E] for ri in E]
    y = solve_square(gram, r)
    out = list(probs)
    for col, i in enumerate(support):
        out[i] += sum(E[k][col] * y[k] for k in range(len(E)))
    # rows dropped as dependent must also be satisfied now
    if any(e != sum(c * p for c, p in zip(a, out)) for a, e in h.equalities):
        raise InvalidProbabilityError("NSND equalities cannot be met on the rounded support")
    return out, True


def rationalize(b: Behavior, tol: float = RATIONAL_TOL) -> Rationalized:
    """Exact NSND behavior within ``tol``-ish of a float behavior.

    Each entry is replaced by its first continued-fraction convergent within
    ``tol``; any remaining equality residual is removed by an exact projection
    that only moves nonzero entries, and the result is checked for
    nonnegativity.
    """
    if b.exact:
        return Rationalized(b, 0.0, False)
    approx = [rational_approximation(p, tol) for p in b.probs]
    fixed, repaired = _project(b.scenario, approx)
    if min(fixed) < 0:
        raise InvalidProbabilityError("repair pushed an entry below zero")
    radius = max(abs(float(q) - p) for q, p in zip(fixed, b.probs))
    out = Behavior(b.scenario, tuple(fixed))
    if check_nsnd(out):
        raise InvalidProbabilityError("rationalized behavior is not NSND")
    return Rationalized(out, radius, repaired)


# -- sweeps -----------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    visibility: float
    classicality: float
    conditional: float
    nclf: Fraction
    cf_bob: Fraction


def noise_sweep(setup: QuantumSetup, visibilities) -> list[SweepPoint]:
    """Mix the setup's state with white noise and track the pentagon quantities."""
    from .quantifiers import contextual_fraction, nonclassical_fraction

    out = []
    for v in visibilities:
        b = behavior_from_state(setup.state.with_noise(v), setup.alice, setup.bob, setup.scenario)
        exact = rationalize(b).behavior
        out.append(
            SweepPoint(
                float(v),
                classicality_value(b),
                conditional_pentagon_value(b),
                nonclassical_fraction(exact).value,
                contextual_fraction(bob_marginal(exact)).value,
            )
        )
    return out


def sweep_csv(points) -> str:
    lines = ["visibility,classicality,conditional,nclf,cf_bob"]
    for p in points:
        lines.append(f"{p.visibility:.12g},{p.classicality:.12g},{p.conditional:.12g},{p.nclf},{p.cf_bob}")
    return "\n".join(lines) + "\n"


# -- files ------------------------------------------------------------------------------

def _encode_matrix(m: np.ndarray) -> list[list[str]]:
    return [[f"{float(z.real)!r},{float(z.imag)!r}" for z in row] for row in np.asarray(m, dtype=complex)]


def _decode_matrix(rows) -> np.ndarray:
    try:
        return np.array([[complex(*map(float, e.split(","))) for e in row] for row in rows], dtype=complex)
    except (ValueError, TypeError, AttributeError):
        raise FormatError("matrix entries must be 're,im' strings") from None


def state_to_dict(rho: DensityOperator) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "state",
        "dimension": rho.dimension,
        "matrix": _encode_matrix(rho.matrix),
    }


def state_from_dict(d: dict) -> DensityOperator:
    if d.get("format_version") != FORMAT_VERSION or d.get("kind") != "state":
        raise FormatError("not a state file of a supported version")
    m = _decode_matrix(d["matrix"])
    if m.shape != (d["dimension"], d["dimension"]):
        raise FormatError(f"matrix shape {m.shape} does not match dimension {d['dimension']}")
    return DensityOperator(m)


def setup_to_dict(q: QuantumSetup) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "quantum-setup",
        "scenario": scenario_to_dict(q.scenario),
        "state": state_to_dict(q.state),
        "alice": [_encode_matrix(o.projector) for o in q.alice],
        "bob": [_encode_matrix(o.projector) for o in q.bob],
    }


def setup_from_dict(d: dict) -> QuantumSetup:
    if d.get("format_version") != FORMAT_VERSION or d.get("kind") != "quantum-setup":
        raise FormatError("not a quantum setup file of a supported version")
    return QuantumSetup(
        state_from_dict(d["state"]),
        tuple(DichotomicObservable(_decode_matrix(m)) for m in d["alice"]),
        tuple(DichotomicObservable(_decode_matrix(m)) for m in d["bob"]),
        scenario_from_dict(d["scenario"]),
    )


def dump_setup(q: QuantumSetup, path) -> None:
    Path(path).write_text(json.dumps(setup_to_dict(q), indent=2) + "\n")


def load_setup(path) -> QuantumSetup:
    try:
        return setup_from_dict(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None


__all__ = [
    "DensityOperator",
    "DichotomicObservable",
    "QuantumSetup",
    "Rationalized",
    "SweepPoint",
    "pentagon_setup",
    "behavior_from_state",
    "classicality_value",
    "conditional_pentagon_value",
    "dump_setup",
    "load_setup",
    "noise_sweep",
    "pentagon_cos2",
    "pentagon_vectors",
    "rational_approximation",
    "rationalize",
    "setup_from_dict",
    "setup_to_dict",
    "state_from_dict",
    "state_to_dict",
    "sweep_csv",
]
