"""Half-space and vertex representations over the rationals."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

import numpy as np

from ..behavior import Behavior, consistency_conditions
from ..scenario import GeneralizedBellScenario, Scenario
from .linalg import exact_matmul, independent_rows, integer_row

Row = tuple  # tuple[Fraction, ...]


@dataclass(frozen=True)
class HPolytope:
    """``{x : a.x <= b for (a, b) in inequalities, a.x == b for (a, b) in equalities}``."""

    dim: int
    inequalities: tuple[tuple[Row, Fraction], ...]
    equalities: tuple[tuple[Row, Fraction], ...] = ()
    labels: tuple[str, ...] = field(default=(), compare=False)
    scenario: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for a, _ in self.inequalities + self.equalities:
            if len(a) != self.dim:
                raise ValueError(f"row of length {len(a)} in a {self.dim}-dimensional polytope")

    def contains(self, x) -> bool:
        x = [Fraction(v) for v in x]
        return all(_dot(a, x) <= b for a, b in self.inequalities) and all(
            _dot(a, x) == b for a, b in self.equalities
        )

    def tight_rows(self, x) -> list[int]:
        x = [Fraction(v) for v in x]
        return [i for i, (a, b) in enumerate(self.inequalities) if _dot(a, x) == b]

    def reduced(self) -> "HPolytope":
        """Same polytope with linearly dependent equality rows removed."""
        rows = [list(a) + [b] for a, b in self.equalities]
        keep = independent_rows(rows)
        return HPolytope(self.dim, self.inequalities, tuple(self.equalities[i] for i in keep), self.labels, self.scenario)

    def with_equality(self, coeffs, value) -> "HPolytope":
        row = (tuple(Fraction(v) for v in coeffs), Fraction(value))
        return HPolytope(self.dim, self.inequalities, self.equalities + (row,), self.labels, self.scenario)

    def nonnegative_coordinates(self) -> list[int | None]:
        """For each inequality row, the coordinate ``i`` if the row reads ``-x_i <= 0``."""
        out = []
        for a, b in self.inequalities:
            nz = [i for i, v in enumerate(a) if v != 0]
            out.append(nz[0] if b == 0 and len(nz) == 1 and a[nz[0]] < 0 else None)
        return out


def _dot(a, x):
    return sum(u * v for u, v in zip(a, x) if u)


def nd_hrep(s: Scenario) -> HPolytope:
    """Nonnegativity, per-context normalization and shared-marginal equalities.

    For a generalized Bell scenario, treated as one contextuality scenario, the
    shared-marginal equalities are exactly the no-signaling and
    no-disturbance conditions.
    """
    d = s.dim
    zero = Fraction(0)
    ineqs, labels = [], []
    for i in range(d):
        a = [zero] * d
        a[i] = Fraction(-1)
        ineqs.append((tuple(a), zero))
        k, o = s.coordinates[i]
        labels.append(f"p[{k}]{o} >= 0")
    eqs = []
    for k in range(len(s.contexts)):
        a = [zero] * d
        for i in range(*s.context_slice(k).indices(d)):
            a[i] = Fraction(1)
        eqs.append((tuple(a), Fraction(1)))
    for cond in consistency_conditions(s):
        a = [zero] * d
        for i in cond.plus:
            a[i] += 1
        for i in cond.minus:
            a[i] -= 1
        eqs.append((tuple(a), zero))
    return HPolytope(d, tuple(ineqs), tuple(eqs), tuple(labels), s)


def nsnd_hrep(g: GeneralizedBellScenario) -> HPolytope:
    if not isinstance(g, GeneralizedBellScenario):
        raise TypeError("nsnd_hrep needs a GeneralizedBellScenario")
    return nd_hrep(g)


class VPolytope:
    """Vertex list stored as integer numerators over per-vertex denominators.

    Vertices are kept in canonical (lexicographic) order and deduplicated.
    """

    def __init__(self, numerators, denominators, scenario: Scenario | None = None, *, _canonical=False):
        num = np.asarray(numerators)
        den = np.asarray(denominators)
        if num.ndim != 2:
            num = num.reshape(len(den), -1)
        self.scenario = scenario
        if _canonical:
            self.numerators, self.denominators = num, den
        else:
            self.numerators, self.denominators = _canonicalize(num, den)

    @classmethod
    def from_points(cls, points, scenario: Scenario | None = None) -> "VPolytope":
        nums, dens = [], []
        for p in points:
            row = [Fraction(v) for v in p]
            den = reduce(lcm, (v.denominator for v in row), 1)
            nums.append([int(v * den) for v in row])
            dens.append(den)
        if not nums:
            dim = scenario.dim if scenario is not None else 0
            return cls(np.zeros((0, dim), dtype=np.int64), np.zeros(0, dtype=np.int64), scenario, _canonical=True)
        return cls(_int_array(nums), _int_array(dens), scenario)

    @classmethod
    def from_behaviors(cls, behaviors) -> "VPolytope":
        behaviors = list(behaviors)
        s = behaviors[0].scenario if behaviors else None
        return cls.from_points([b.probs for b in behaviors], s)

    def __len__(self):
        return len(self.denominators)

    @property
    def dim(self) -> int:
        return self.numerators.shape[1]

    def vertex(self, i: int) -> tuple[Fraction, ...]:
        den = int(self.denominators[i])
        return tuple(Fraction(int(v), den) for v in self.numerators[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self.vertex(i)

    def behaviors(self):
        if self.scenario is None:
            raise ValueError("VPolytope has no scenario attached")
        for v in self:
            yield Behavior(self.scenario, v)

    def behavior(self, i: int) -> Behavior:
        return Behavior(self.scenario, self.vertex(i))

    def as_set(self) -> set[tuple[Fraction, ...]]:
        return set(self)

    def common_denominator(self) -> tuple[np.ndarray, int]:
        """Integer matrix ``M`` and ``L`` with ``vertex(i) == M[i] / L``."""
        L = reduce(lcm, (int(d) for d in set(self.denominators.tolist())), 1)
        scale = np.array([L // int(d) for d in self.denominators], dtype=object)
        M = self.numerators.astype(object) * scale[:, None]
        return _int_array(M.tolist()) if len(M) else M, L

    def __eq__(self, other):
        if not isinstance(other, VPolytope):
            return NotImplemented
        return (
            len(self) == len(other)
            and np.array_equal(self.denominators, other.denominators)
            and np.array_equal(self.numerators, other.numerators)
        )

    def __repr__(self):
        return f"VPolytope({len(self)} vertices in dimension {self.dim})"


def _int_array(rows) -> np.ndarray:
    """int64 array when every entry fits, object array otherwise."""
    arr = np.array(rows, dtype=object)
    if arr.size == 0:
        return arr.astype(np.int64)
    big = max(abs(int(v)) for v in arr.flat)
    return arr.astype(np.int64) if big < 2**62 else arr


def _canonicalize(num: np.ndarray, den: np.ndarray):
    if len(den) == 0:
        return num, den
    num = num.astype(object) if num.dtype == object else num
    # reduce each row to lowest terms with a positive denominator
    rows, dens = [], []
    for r, d in zip(num.tolist(), den.tolist()):
        g = reduce(gcd, r, d)
        if d < 0:
            g = -g
        rows.append([v // g for v in r])
        dens.append(d // g)
    L = reduce(lcm, set(dens), 1)
    scaled = [[v * (L // d) for v in r] for r, d in zip(rows, dens)]
    order = sorted(range(len(rows)), key=lambda i: scaled[i])
    seen, keep = set(), []
    for i in order:
        key = tuple(scaled[i])
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return _int_array([rows[i] for i in keep]), _int_array([dens[i] for i in keep])


def hrep_integer_rows(h: HPolytope):
    """Primitive integer forms ``(A, b)`` of the inequality and equality rows."""
    def conv(rows):
        A, b = [], []
        for a, rhs in rows:
            r = integer_row(list(a) + [rhs])
            A.append(r[:-1])
            b.append(r[-1])
        return A, b

    return conv(h.inequalities), conv(h.equalities)


def verify_vertices(h: HPolytope, v: VPolytope) -> list[int]:
    """Indices of vertices violating some row of ``h`` (empty when all are members)."""
    (Ai, bi), (Ae, be) = hrep_integer_rows(h)
    if len(v) == 0:
        return []
    bad = set()
    for A, b, broken in ((Ai, bi, np.greater), (Ae, be, np.not_equal)):
        if not A:
            continue
        lhs = exact_matmul(np.array(A, dtype=object), v.numerators.T)
        rhs = exact_matmul(np.array(b, dtype=object)[:, None], v.denominators[None, :])
        bad.update(np.nonzero(broken(lhs, rhs).any(axis=0))[0].tolist())
    return sorted(bad)
