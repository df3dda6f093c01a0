"""Linear inequalities on behaviors, written in the correlator basis.

Every inequality is stored as ``sum_S c_S <S> <= bound``.  Inequalities that
are naturally stated as ``>=`` are negated on construction and remember
their orientation, so :meth:`Inequality.display` prints them the way they
are usually written.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .behavior import Behavior, as_fraction, bob_marginal, correlator
from .errors import (
    DegenerateInequalityError,
    FormatError,
    IncompatibleSetError,
    InvalidInequalityError,
    InvalidPairError,
    ScenarioMismatchError,
)
from .geometry.lp import maximize_linear
from .geometry.polytope import HPolytope, nd_hrep
from .scenario import (
    FORMAT_VERSION,
    OUTCOMES,
    GeneralizedBellScenario,
    Scenario,
    alice_side,
    generalized_bell,
    n_cycle,
    peres_mermin,
    pm_label,
    scenario_from_dict,
    scenario_to_dict,
)

Term = tuple[frozenset, Fraction]


def _key(subset) -> frozenset:
    if isinstance(subset, str):
        return frozenset(subset.split())
    return frozenset(subset)


def _order(s: Scenario, key: frozenset) -> list[str]:
    ids = s.measurement_ids
    return sorted(key, key=ids.index)


@dataclass(frozen=True)
class Inequality:
    scenario: Scenario
    terms: tuple[Term, ...]
    classical_bound: Fraction
    label: str
    orientation: str = "<="
    nsnd_max: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        merged: dict[frozenset, Fraction] = {}
        for k, c in self.terms:
            k = _key(k)
            if k and not self.scenario.contexts_containing(k):
                raise IncompatibleSetError(f"{sorted(k)} is not contained in any context of {self.scenario.name}")
            merged[k] = merged.get(k, Fraction(0)) + as_fraction(c)
        object.__setattr__(self, "terms", tuple((k, c) for k, c in merged.items() if c != 0))
        object.__setattr__(self, "classical_bound", as_fraction(self.classical_bound))
        if self.nsnd_max is not None:
            object.__setattr__(self, "nsnd_max", as_fraction(self.nsnd_max))
        if self.orientation not in ("<=", ">="):
            raise InvalidInequalityError(f"orientation must be '<=' or '>=', got {self.orientation!r}")

    def coefficients(self) -> tuple[Fraction, ...]:
        """The functional on the scenario's probability coordinates."""
        s = self.scenario
        f = [Fraction(0)] * s.dim
        for key, c in self.terms:
            if not key:
                # a constant: any context sums to one
                for i in range(*s.context_slice(0).indices(s.dim)):
                    f[i] += c
                continue
            k = s.contexts_containing(key)[0]
            ctx = s.contexts[k]
            pos = [ctx.index(m) for m in key]
            for o in itertools.product(OUTCOMES, repeat=len(ctx)):
                sign = 1
                for p in pos:
                    sign *= o[p]
                f[s.index(k, o)] += sign * c
        return tuple(f)

    def __add__(self, other: "Inequality") -> "Inequality":
        if other.scenario != self.scenario:
            raise ScenarioMismatchError("cannot add inequalities on different scenarios")
        return Inequality(
            self.scenario,
            self.terms + other.terms,
            self.classical_bound + other.classical_bound,
            f"{self.label} + {other.label}",
        )

    def lifted(self, scenario: Scenario) -> "Inequality":
        """The same functional read on a larger scenario containing these contexts."""
        return replace(self, scenario=scenario, nsnd_max=None)

    def as_geq(self) -> "Inequality":
        """Same constraint, displayed in ``>=`` orientation."""
        return replace(self, orientation=">=")

    def display(self) -> str:
        sign = -1 if self.orientation == ">=" else 1
        parts = []
        for key, c in self.terms:
            c = sign * c
            body = f"<{' '.join(_order(self.scenario, key))}>" if key else "1"
            mag = abs(c)
            coef = "" if mag == 1 and key else f"{mag} "
            parts.append(("- " if c < 0 else "+ ") + coef + body)
        text = " ".join(parts) if parts else "0"
        if text.startswith("+ "):
            text = text[2:]
        elif text.startswith("- "):
            text = "-" + text[2:]
        return f"{text} {self.orientation} {sign * self.classical_bound}"

    def __str__(self):
        return f"{self.label}: {self.display()}"


def evaluate(i: Inequality, b: Behavior):
    """Value of the (stored, ``<=``-oriented) functional at ``b``."""
    if b.scenario != i.scenario:
        raise ScenarioMismatchError(f"inequality is on {i.scenario.name}, behavior on {b.scenario.name}")
    total = 0
    for key, c in i.terms:
        total += c * (correlator(b, key) if key else 1)
    return total


def maximize(i: Inequality, h: HPolytope | None = None):
    """Exact LP maximum of the functional over ``h`` (default: the ND/NSND polytope)."""
    h = h if h is not None else nd_hrep(i.scenario)
    return maximize_linear(h, i.coefficients())


@dataclass(frozen=True)
class NormalizedInequality:
    """``S' = (S - classical_bound) / (nsnd_max - classical_bound)``."""

    base: Inequality
    classical_bound: Fraction
    nsnd_max: Fraction

    @property
    def shift(self) -> Fraction:
        return -self.classical_bound

    @property
    def scale(self) -> Fraction:
        return 1 / (self.nsnd_max - self.classical_bound)

    def value(self, b: Behavior):
        return (evaluate(self.base, b) + self.shift) * self.scale

    def __str__(self):
        return f"({self.base.label} - {self.classical_bound}) / {self.nsnd_max - self.classical_bound}"


def normalize(i: Inequality, h: HPolytope | None = None) -> NormalizedInequality:
    """Rescale so the classical bound maps to 0 and the polytope maximum to 1.

    The maximum is computed by exact LP over ``h`` (default: the ND/NSND
    polytope of the inequality's scenario).
    """
    top = maximize(i, h).value
    if top <= i.classical_bound:
        raise DegenerateInequalityError(
            f"{i.label}: polytope maximum {top} does not exceed the classical bound {i.classical_bound}"
        )
    return NormalizedInequality(i, i.classical_bound, top)


# -- named families -------------------------------------------------------------

def _gamma(gamma) -> tuple[int, ...]:
    out = []
    for g in gamma:
        if isinstance(g, str):
            g = {"+": 1, "-": -1}.get(g, g)
        g = int(g)
        if g not in OUTCOMES:
            raise InvalidInequalityError(f"sign {g} is not +1 or -1")
        out.append(g)
    return tuple(out)


def ncycle_nc(n: int, gamma) -> Inequality:
    """``sum_j gamma_j <B_j B_{j+1}> <= n - 2`` with an odd number of negative signs."""
    gamma = _gamma(gamma)
    if len(gamma) != n:
        raise InvalidInequalityError(f"need {n} signs, got {len(gamma)}")
    if gamma.count(-1) % 2 == 0:
        raise InvalidInequalityError("an n-cycle noncontextuality inequality needs an odd number of -1 signs")
    s = n_cycle(n)
    terms = tuple((frozenset(ctx), Fraction(g)) for ctx, g in zip(s.contexts, gamma))
    tag = "".join("+" if g == 1 else "-" for g in gamma)
    return Inequality(s, terms, n - 2, f"nc[{n}]({tag})", nsnd_max=n)


def ncycle_nc_family(n: int) -> list[Inequality]:
    return [ncycle_nc(n, g) for g in itertools.product(OUTCOMES, repeat=n) if g.count(-1) % 2 == 1]


def kcbs() -> Inequality:
    return replace(ncycle_nc(5, (1, 1, 1, 1, -1)), label="kcbs")


def pentagon_anticorrelation() -> Inequality:
    """``sum_j <B_j B_{j+1}> >= -3`` on the 5-cycle."""
    return replace(ncycle_nc(5, (-1,) * 5), label="pentagon-anticorrelation").as_geq()


def _bob_id(s: GeneralizedBellScenario, b) -> str:
    if isinstance(b, int):
        return s.bob.measurement_ids[b % len(s.bob.measurement_ids)]
    if b not in s.bob.measurement_ids:
        raise InvalidPairError(f"{b} is not one of Bob's measurements")
    return b


def _chsh_terms(a0, a1, u: frozenset, v: frozenset):
    return (
        (frozenset({a0}) | u, Fraction(1)),
        (frozenset({a0}) | v, Fraction(1)),
        (frozenset({a1}) | u, Fraction(1)),
        (frozenset({a1}) | v, Fraction(-1)),
    )


def _two_party(n: int | None, scenario, alice: int = 2) -> GeneralizedBellScenario:
    if scenario is not None:
        return scenario
    return generalized_bell(alice_side(alice), n_cycle(n if n is not None else 5))


def chsh_usual(i=0, j=2, *, n: int | None = None, scenario: GeneralizedBellScenario | None = None) -> Inequality:
    """``<A0 Bi> + <A0 Bj> + <A1 Bi> - <A1 Bj> <= 2`` for incompatible ``Bi``, ``Bj``."""
    g = _two_party(n, scenario)
    bi, bj = _bob_id(g, i), _bob_id(g, j)
    if bi == bj or g.bob.contexts_containing({bi, bj}):
        raise InvalidPairError(f"{bi} and {bj} are compatible; the usual CHSH needs incompatible measurements")
    a0, a1 = g.alice.measurement_ids[:2]
    terms = _chsh_terms(a0, a1, frozenset({bi}), frozenset({bj}))
    return Inequality(g, terms, 2, f"chsh({bi},{bj})", nsnd_max=4)


GENERALIZED_CHSH_VARIANTS = ("pair-single", "pair-pair", "single-pair")


def chsh_generalized(
    variant: str = "pair-single",
    *,
    i: int = 0,
    j: int = 2,
    n: int | None = None,
    scenario: GeneralizedBellScenario | None = None,
) -> Inequality:
    """CHSH-type generalized Bell inequalities with context products on Bob's side.

    ``pair-single``: ``<A0 BiBi+1> + <A0 Bj> + <A1 BiBi+1> - <A1 Bj> <= 2``;
    ``pair-pair`` uses ``BjBj+1`` in place of ``Bj``; ``single-pair`` uses
    ``Bi`` in place of ``BiBi+1``.
    """
    g = _two_party(n, scenario)
    if variant not in GENERALIZED_CHSH_VARIANTS:
        raise InvalidInequalityError(f"unknown variant {variant!r}; choose from {GENERALIZED_CHSH_VARIANTS}")
    ids = g.bob.measurement_ids
    m = len(ids)

    def pair(k):
        return frozenset({ids[k % m], ids[(k + 1) % m]})

    def single(k):
        return frozenset({ids[k % m]})

    u = pair(i) if variant.startswith("pair") else single(i)
    v = pair(j) if variant.endswith("pair") else single(j)
    a0, a1 = g.alice.measurement_ids[:2]
    return Inequality(g, _chsh_terms(a0, a1, u, v), 2, f"chsh-{variant}({i},{j})", nsnd_max=4)


def chained(n: int, *, scenario: GeneralizedBellScenario | None = None) -> Inequality:
    """``sum_j <A_j B_jB_j+1> + sum_{j<n-1} <A_j+1 B_jB_j+1> - <A_0 B_n-1B_0> <= 2n - 2``."""
    g = scenario or generalized_bell(alice_side(n), n_cycle(n))
    if g.n_alice < n or len(g.bob.measurements) != n:
        raise InvalidInequalityError(f"chained({n}) needs at least {n} Alice settings and a {n}-cycle")
    A = g.alice.measurement_ids
    B = g.bob.measurement_ids

    def pair(k):
        return frozenset({B[k], B[(k + 1) % n]})

    terms = [(frozenset({A[k]}) | pair(k), Fraction(1)) for k in range(n)]
    terms += [(frozenset({A[k + 1]}) | pair(k), Fraction(1)) for k in range(n - 1)]
    terms.append((frozenset({A[0]}) | pair(n - 1), Fraction(-1)))
    return Inequality(g, tuple(terms), 2 * n - 2, f"chained({n})", nsnd_max=2 * n)


def pm_noncontextuality() -> Inequality:
    """Columns plus rows one and two minus row three, bounded by 4."""
    s = peres_mermin()
    terms = [(frozenset(pm_label(r, c) for r in (1, 2, 3)), Fraction(1)) for c in (1, 2, 3)]
    terms += [(frozenset(pm_label(r, c) for c in (1, 2, 3)), Fraction(1 if r < 3 else -1)) for r in (1, 2, 3)]
    return Inequality(s, tuple(terms), 4, "peres-mermin", nsnd_max=6)


def pm_chsh() -> Inequality:
    """The usual CHSH between Alice and the incompatible pair ``B11``, ``B22``."""
    return chsh_usual("B11", "B22", scenario=generalized_bell(alice_side(2), peres_mermin()))


def pentagon_d_terms(s: GeneralizedBellScenario) -> tuple[Term, ...]:
    """``D = sum_j B_j B_j+1`` over the 5-cycle contexts."""
    return tuple((frozenset(ctx), Fraction(1)) for ctx in s.bob.contexts)


def classicality_pentagon() -> Inequality:
    """``3<A> + <(1 + A) D> >= -3`` with ``D = sum_j B_j B_j+1`` (single Alice setting)."""
    g = generalized_bell(alice_side(1), n_cycle(5))
    a = g.alice.measurement_ids[0]
    D = pentagon_d_terms(g)
    terms = [(frozenset({a}), Fraction(3))]
    terms += list(D)
    terms += [(k | {a}, c) for k, c in D]
    # stored negated so that the internal form is <=
    neg = tuple((k, -c) for k, c in terms)
    return Inequality(g, neg, 3, "pentagon-classicality", orientation=">=")


# -- relabelings -------------------------------------------------------------------------

def relabel(i: Inequality, permutation: dict | None = None, flips=()) -> Inequality:
    """Apply a context-preserving measurement permutation and outcome flips.

    Flipping the outcome of ``M`` negates every correlator containing ``M``;
    the classical bound is unchanged.
    """
    s = i.scenario
    perm = {m: m for m in s.measurement_ids}
    perm.update(permutation or {})
    if sorted(perm.values()) != sorted(s.measurement_ids):
        raise InvalidInequalityError("permutation must be a bijection of the scenario's measurements")
    ctxs = {frozenset(c) for c in s.contexts}
    if {frozenset(perm[m] for m in c) for c in ctxs} != ctxs:
        raise InvalidInequalityError("permutation does not preserve the contexts")
    flips = set(flips)
    terms = []
    for key, c in i.terms:
        sign = (-1) ** len(key & flips)
        terms.append((frozenset(perm[m] for m in key), c * sign))
    return replace(i, terms=tuple(terms), label=f"{i.label}*")


# -- trade-off ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TradeoffSum:
    gbell: Fraction
    nc: Fraction

    @property
    def sum(self) -> Fraction:
        return self.gbell + self.nc

    @property
    def satisfied(self) -> bool:
        return self.sum <= 1


def tradeoff_sum(b: Behavior, s_gbell: NormalizedInequality, s_nc: NormalizedInequality) -> TradeoffSum:
    """Normalized generalized-Bell value of ``b`` plus normalized NC value of Bob's marginal."""
    return TradeoffSum(s_gbell.value(b), s_nc.value(bob_marginal(b)))


# -- files ---------------------------------------------------------------------------------

def inequality_to_dict(i: Inequality) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "inequality",
        "label": i.label,
        "orientation": i.orientation,
        "scenario": scenario_to_dict(i.scenario),
        "terms": [{"subset": " ".join(_order(i.scenario, k)), "coefficient": str(c)} for k, c in i.terms],
        "bound": str(i.classical_bound),
        "nsnd_max": None if i.nsnd_max is None else str(i.nsnd_max),
    }


def inequality_from_dict(d: dict) -> Inequality:
    if d.get("format_version") != FORMAT_VERSION or d.get("kind") != "inequality":
        raise FormatError("not an inequality file of a supported version")
    try:
        s = scenario_from_dict(d["scenario"])
        terms = tuple((_key(t["subset"]), Fraction(t["coefficient"])) for t in d["terms"])
        return Inequality(
            s,
            terms,
            Fraction(d["bound"]),
            d.get("label", ""),
            d.get("orientation", "<="),
            None if d.get("nsnd_max") is None else Fraction(d["nsnd_max"]),
        )
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad inequality entry: {exc}") from None


def dump_inequality(i: Inequality, path) -> None:
    Path(path).write_text(json.dumps(inequality_to_dict(i), indent=2) + "\n")


def load_inequality(path) -> Inequality:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return inequality_from_dict(data)


NAMED = {
    "kcbs": kcbs,
    "pentagon-anticorrelation": pentagon_anticorrelation,
    "pentagon-classicality": classicality_pentagon,
    "peres-mermin": pm_noncontextuality,
    "pm-chsh": pm_chsh,
}
