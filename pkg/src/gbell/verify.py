"""End-to-end reproductions, each returning a :class:`Report`.

Reports carry a PASS/FAIL status, a summary of the quantities that decide
it, and the certificates needed to re-check it independently (LP
decompositions, argmax vertices, tight rows).
"""
from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .behavior import (
    Behavior,
    behavior_from_correlators,
    bob_marginal,
    correlator,
    mix,
)
from .errors import DegenerateInequalityError, PreconditionError
from .geometry import (
    DEFAULT_BUDGET,
    HPolytope,
    VPolytope,
    deterministic_vertices,
    enumerate_vertices,
    local_vertices,
    max_over_points,
    maximize_linear,
    nd_hrep,
    ncycle_contextual_vertices,
    ncycle_nd_vertices,
    ncycle_vertex_specs,
    nsnd_hrep,
)
from .inequalities import (
    GENERALIZED_CHSH_VARIANTS,
    Inequality,
    NormalizedInequality,
    chained,
    chsh_generalized,
    chsh_usual,
    evaluate,
    kcbs,
    maximize,
    ncycle_nc_family,
    normalize,
    pm_chsh,
    pm_noncontextuality,
    relabel,
)
from .quantifiers import (
    FractionCertificate,
    check_quantifier_tradeoff,
    contextual_fraction,
    nonlocal_fraction,
)
from .scenario import ContextualityScenario, GeneralizedBellScenario, alice_side, generalized_bell, n_cycle, peres_mermin


@dataclass
class Report:
    check: str
    passed: bool
    summary: dict = field(default_factory=dict)
    details: list = field(default_factory=list)
    certificates: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "status": self.status,
            "summary": self.summary,
            "details": self.details,
            "certificates": self.certificates,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_jsonable) + "\n"

    def to_text(self) -> str:
        lines = [f"check: {self.check}"]
        for k, v in self.summary.items():
            lines.append(f"  {k}: {_fmt(v)}")
        for d in self.details:
            lines.append("  - " + ", ".join(f"{k}={_fmt(v)}" for k, v in d.items()))
        lines += ["", "== SUMMARY ==", f"{self.check}: {self.status}"]
        return "\n".join(lines) + "\n"


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (set, frozenset, tuple)):
        return list(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)) and len(v) > 8:
        return f"[{len(v)} entries]"
    return str(v)


def _cert(c: FractionCertificate) -> dict:
    """Compact certificate: weights with deterministic assignments where possible."""
    out = {"quantifier": c.kind, "value": str(c.value), "method": c.method, "parts": []}
    for w, v in c.classical_part:
        out["parts"].append({"weight": str(w), "vertex": _describe(v)})
    return out


def _describe(b: Behavior):
    """``{id: +-1}`` for a deterministic behavior, else the probability table."""
    if all(p in (0, 1) for p in b.probs):
        return {m: int(correlator(b, (m,))) for m in b.scenario.measurement_ids}
    return [str(p) for p in b.probs]


# -- vertex lists --------------------------------------------------------------------------

_NSND_CACHE: dict = {}


def ncycle_scenario(n: int, alice: int = 2) -> GeneralizedBellScenario:
    return generalized_bell(alice_side(alice), n_cycle(n))


def nsnd_vertices(g: GeneralizedBellScenario, *, budget=DEFAULT_BUDGET, checkpoint=None) -> VPolytope:
    """Exact NSND vertex list, memoized per scenario for the process lifetime."""
    if g not in _NSND_CACHE:
        _NSND_CACHE[g] = enumerate_vertices(nsnd_hrep(g), budget=budget, checkpoint=checkpoint)
    return _NSND_CACHE[g]


def _alice_plus(v: VPolytope, g: GeneralizedBellScenario) -> np.ndarray:
    """Numerators of ``p_x(+1)`` (over each vertex's denominator), shape (N, n_alice)."""
    cols = []
    for x in range(g.n_alice):
        sl = g.context_slice(g.joint_index(x, 0))
        half = (sl.stop - sl.start) // 2
        cols.append(v.numerators[:, sl.start : sl.start + half].sum(axis=1))
    return np.stack(cols, axis=1)


def _bob_rows(v: VPolytope, g: GeneralizedBellScenario) -> np.ndarray:
    """Numerators of Bob's marginal (read at ``x = 0``), shape (N, bob.dim)."""
    parts = []
    for kb in range(len(g.bob.contexts)):
        sl = g.context_slice(g.joint_index(0, kb))
        half = (sl.stop - sl.start) // 2
        block = v.numerators[:, sl]
        parts.append(block[:, :half] + block[:, half:])
    return np.concatenate(parts, axis=1)


def _integer_functional(coeffs) -> tuple[np.ndarray, int]:
    scale = math.lcm(*(Fraction(c).denominator for c in coeffs))
    return np.array([int(Fraction(c) * scale) for c in coeffs], dtype=object), scale


def _values(num: np.ndarray, den: np.ndarray, coeffs) -> list[Fraction]:
    f, scale = _integer_functional(coeffs)
    raw = num.astype(object) @ f
    return [Fraction(int(r), int(d) * scale) for r, d in zip(raw, den)]


def _ncycle_nc_violations(rows: np.ndarray, den: np.ndarray, bob: ContextualityScenario) -> np.ndarray:
    """Boolean per row: some n-cycle NC inequality is violated (exact)."""
    out = np.zeros(len(rows), dtype=bool)
    for ineq in ncycle_nc_family(len(bob.measurements)):
        f, scale = _integer_functional(ineq.coefficients())
        raw = rows.astype(object) @ f
        bound = ineq.classical_bound * scale
        out |= np.array([Fraction(int(r), int(d)) > bound for r, d in zip(raw, den)], dtype=bool)
    return out


def _is_ncycle(bob: ContextualityScenario) -> bool:
    n = len(bob.measurements)
    return n >= 3 and bob == n_cycle(n)


def _contextual_flags(rows: np.ndarray, den: np.ndarray, bob: ContextualityScenario) -> np.ndarray:
    if _is_ncycle(bob):
        return _ncycle_nc_violations(rows, den, bob)
    # no facet list: one CF LP per distinct marginal
    cache: dict = {}
    flags = np.zeros(len(rows), dtype=bool)
    for k, (r, d) in enumerate(zip(rows, den)):
        key = tuple(Fraction(int(p), int(d)) for p in r)
        if key not in cache:
            cache[key] = contextual_fraction(Behavior(bob, key)).value > 0
        flags[k] = cache[key]
    return flags


# -- vertex classification ------------------------------------------------------------------

@dataclass(frozen=True)
class VertexClassification:
    scenario: GeneralizedBellScenario
    vertices: VPolytope
    is_local: np.ndarray
    bob_contextual: np.ndarray
    cross_checks: tuple[dict, ...]

    @property
    def records(self):
        for k in range(len(self.vertices)):
            yield {"vertex": k, "is_local": bool(self.is_local[k]), "bob_marginal_contextual": bool(self.bob_contextual[k])}

    @property
    def counts(self) -> dict:
        nl = ~self.is_local
        return {
            "vertices": len(self.vertices),
            "local": int(self.is_local.sum()),
            "nonlocal": int(nl.sum()),
            "bob_contextual": int(self.bob_contextual.sum()),
            "nonlocal_and_contextual": int((nl & self.bob_contextual).sum()),
        }

    @property
    def cross_checks_agree(self) -> bool:
        return all(c["agrees"] for c in self.cross_checks)


def classify_vertices(
    g: GeneralizedBellScenario,
    vertices: VPolytope | None = None,
    *,
    sample: int = 12,
    seed: int = 0,
    budget=DEFAULT_BUDGET,
    checkpoint=None,
) -> VertexClassification:
    """Tag every NSND vertex as local or not, and Bob-contextual or not.

    A vertex is local iff Alice's marginal is deterministic.  A seeded
    sample of vertices is re-decided by full LPs (NLF and CF of Bob's
    marginal) as a cross-check.
    """
    v = vertices if vertices is not None else nsnd_vertices(g, budget=budget, checkpoint=checkpoint)
    den = v.denominators
    ap = _alice_plus(v, g)
    is_local = ((ap == 0) | (ap == den[:, None])).all(axis=1)
    rows = _bob_rows(v, g)
    ctx = _contextual_flags(rows, den, g.bob)

    rng = random.Random(seed)
    picks = set()
    for flag in (is_local, ~is_local, ctx, ~ctx):
        idx = np.nonzero(flag)[0].tolist()
        picks.update(rng.sample(idx, min(len(idx), max(1, sample // 4))))
    checks = []
    bob_v = ncycle_nd_vertices(len(g.bob.measurements)) if _is_ncycle(g.bob) else None
    for k in sorted(picks):
        b = v.behavior(k)
        nlf = nonlocal_fraction(b, bob_v, shortcut=False)
        cf = contextual_fraction(bob_marginal(b), shortcut=False)
        agrees = (nlf.value == 0) == bool(is_local[k]) and (cf.value > 0) == bool(ctx[k])
        checks.append({"vertex": k, "nlf": str(nlf.value), "cf": str(cf.value), "agrees": agrees})
    return VertexClassification(g, v, is_local, ctx, tuple(checks))


def check_result1(n: int, *, long: bool = False, budget=DEFAULT_BUDGET, checkpoint=None, seed: int = 0) -> Report:
    """No NSND vertex of ``alice_side(2) x n_cycle(n)`` is both nonlocal and contextual."""
    if n < 3:
        raise PreconditionError(f"n must be at least 3, got {n}")
    if n >= 5 and not long:
        raise PreconditionError(f"n={n} enumeration is long-running; enable long mode")
    g = ncycle_scenario(n)
    c = classify_vertices(g, budget=None if long else budget, checkpoint=checkpoint, seed=seed)
    counts = c.counts
    bad = [r for r in c.records if not r["is_local"] and r["bob_marginal_contextual"]]
    return Report(
        f"result1[n={n}]",
        counts["nonlocal_and_contextual"] == 0 and c.cross_checks_agree,
        {**counts, "cross_checks_agree": c.cross_checks_agree},
        bad[:20],
        list(c.cross_checks),
    )


# -- the equal-mixture lemma ----------------------------------------------------------------

def check_lemma_equal_mixtures(n: int) -> Report:
    """Every 1/2-1/2 mixture of two contextual n-cycle vertices has CF = 0."""
    if n < 3:
        raise PreconditionError(f"n must be at least 3, got {n}")
    ctx = ncycle_contextual_vertices(n)
    det = deterministic_vertices(n_cycle(n))
    half = Fraction(1, 2)
    details, certs = [], []
    for i, j in itertools.combinations(range(len(ctx)), 2):
        cf = contextual_fraction(mix([ctx[i], ctx[j]], [half, half]), det)
        details.append({"pair": [i, j], "cf": cf.value})
        certs.append({"pair": [i, j], **_cert(cf)})
    failures = [d for d in details if d["cf"] != 0]
    return Report(
        f"lemma-equal-mixtures[n={n}]",
        not failures,
        {"contextual_vertices": len(ctx), "pairs": len(details), "nonzero_cf": len(failures)},
        failures,
        certs,
    )


# -- unique maximizers and product form ------------------------------------------------------

def check_result4(n: int, vertices: VPolytope | None = None, *, product_check: bool | None = None) -> Report:
    """Unique ND maximizer per NC inequality, and product form over contextual Bob marginals.

    The product-form part needs the NSND vertex list; it runs by default for
    ``n <= 4`` or whenever ``vertices`` is given.
    """
    nd = ncycle_nd_vertices(n)
    specs = {spec.behavior(n_cycle(n)).probs: spec for spec in ncycle_vertex_specs(n)}
    details, certs = [], []
    ok = True
    for ineq in ncycle_nc_family(n):
        top, arg = max_over_points(nd, ineq.coefficients())
        unique = len(arg) == 1 and top == n
        ok &= unique
        spec = specs[nd.vertex(arg[0])]
        details.append({"inequality": ineq.label, "max": top, "maximizers": len(arg), "unique": unique})
        certs.append({"inequality": ineq.label, "argmax": [arg_k for arg_k in arg], "kind": spec.kind, "signs": list(spec.signs)})
    summary = {"nc_inequalities": len(details), "all_unique_at_n": ok}

    if product_check is None:
        product_check = vertices is not None or n <= 4
    if product_check:
        g = ncycle_scenario(n)
        v = vertices if vertices is not None else nsnd_vertices(g)
        prod_ok, checked = _product_form(v, g, n)
        summary.update({"qualifying_vertices": checked, "all_product": prod_ok})
        ok &= prod_ok
    return Report(f"result4[n={n}]", ok, summary, details, certs)


def _product_form(v: VPolytope, g: GeneralizedBellScenario, n: int) -> tuple[bool, int]:
    """Check ``p(a, b|x, C) = p_x(a) q_C(b)`` on every vertex with a contextual Bob marginal."""
    contextual = {b.probs for b in ncycle_contextual_vertices(n)}
    den = v.denominators
    rows = _bob_rows(v, g)
    ap = _alice_plus(v, g)
    checked, ok = 0, True
    for k in range(len(v)):
        d = int(den[k])
        q = tuple(Fraction(int(p), d) for p in rows[k])
        if q not in contextual:
            continue
        checked += 1
        b = v.behavior(k)
        for x, kb in g.joint_contexts:
            dist = b.distribution(g.joint_index(x, kb))
            qc = q[g.bob.context_slice(kb)]
            pa = (Fraction(int(ap[k, x]), d), 1 - Fraction(int(ap[k, x]), d))
            want = [pa[ai] * qq for ai in range(2) for qq in qc]
            if list(dist) != want:
                ok = False
    return ok, checked


# -- maximal violations ----------------------------------------------------------------------

FORCED_ZERO = {"pair-pair": ("A0", "A1", "B0 B1", "B2 B3")}


def family_inequality(family: str, n: int, scenario: GeneralizedBellScenario | None = None) -> Inequality:
    if family == "chained":
        return chained(n, scenario=scenario)
    if family not in GENERALIZED_CHSH_VARIANTS:
        raise PreconditionError(f"unknown family {family!r}")
    return chsh_generalized(family, n=n, scenario=scenario)


def _maximizer_face(h: HPolytope, ineq: Inequality, top, vertices: VPolytope | None, budget) -> VPolytope:
    if vertices is not None:
        vals = _values(vertices.numerators, vertices.denominators, ineq.coefficients())
        keep = [k for k, val in enumerate(vals) if val == top]
        return VPolytope.from_points([vertices.vertex(k) for k in keep], vertices.scenario)
    return enumerate_vertices(h.with_equality(ineq.coefficients(), top), budget=budget)


def check_max_violation_implies_nc(
    family: str,
    n: int,
    scenario: GeneralizedBellScenario | None = None,
    *,
    vertices: VPolytope | None = None,
    budget=DEFAULT_BUDGET,
) -> Report:
    """Maximal NSND violation forces a noncontextual Bob marginal.

    All maximizing vertices are collected (from ``vertices`` by value, or by
    enumerating the optimal face), and each Bob marginal is tested against
    the full NC facet list.  The local maximum is checked as well.
    """
    ineq = family_inequality(family, n, scenario)
    g = ineq.scenario
    h = nsnd_hrep(g)
    opt = maximize(ineq, h)
    expected = ineq.nsnd_max
    face = _maximizer_face(h, ineq, opt.value, vertices, budget)
    rows = _bob_rows(face, g)
    ctx = _contextual_flags(rows, face.denominators, g.bob)
    forced = {}
    for key in FORCED_ZERO.get(family, ()):
        vals = {correlator(face.behavior(k), key) for k in range(len(face))}
        forced[key] = sorted(vals)
    forced_ok = all(vals == [0] for vals in forced.values())
    local_top, local_arg = max_over_points(local_vertices(g), ineq.coefficients())
    local_expected = ineq.classical_bound
    ok = opt.value == expected and not ctx.any() and forced_ok and local_top == local_expected
    return Report(
        f"max-violation[{ineq.label}, {g.name}]",
        ok,
        {
            "nsnd_max": opt.value,
            "expected_max": expected,
            "maximizing_vertices": len(face),
            "contextual_marginals": int(ctx.sum()),
            "forced_zero_correlators": {k: [str(x) for x in v] for k, v in forced.items()},
            "local_max": local_top,
            "expected_local_max": local_expected,
        },
        [],
        [
            {"lp_optimizer": [str(x) for x in opt.point], "tight_rows": list(opt.tight_rows)},
            {"local_argmax": local_arg[:20]},
        ],
    )


# -- monogamy --------------------------------------------------------------------------------

def check_monogamy(n: int = 5) -> Report:
    """Usual CHSH on ``(B0, B2)`` plus the lifted KCBS functional is at most 5 on NSND."""
    g = ncycle_scenario(n)
    h = nsnd_hrep(g)
    chsh = chsh_usual(0, 2, scenario=g)
    nc = kcbs().lifted(g) if n == 5 else ncycle_nc_family(n)[0].lifted(g)
    both = chsh + nc
    vals = {name: maximize_linear(h, i.coefficients()) for name, i in (("chsh", chsh), ("nc", nc), ("sum", both))}
    ok = vals["sum"].value == 5 and vals["chsh"].value == 4 and vals["nc"].value == 5
    return Report(
        f"monogamy[n={n}]",
        ok,
        {"max_chsh_plus_nc": vals["sum"].value, "max_chsh": vals["chsh"].value, "max_nc": vals["nc"].value},
        [],
        [{"functional": k, "optimizer": [str(x) for x in r.point], "tight_rows": list(r.tight_rows)} for k, r in vals.items()],
    )


# -- Peres-Mermin counterexample --------------------------------------------------------------

PM_CORRELATORS = {
    "A0 B11": 1, "A0 B22": 1, "A1 B11": 1, "A1 B22": -1,
    "B11 B12 B13": 1, "B21 B22 B23": 1, "B31 B32 B33": -1,
    "B11 B21 B31": 1, "B12 B22 B32": 1, "B13 B23 B33": 1,
    "A0 B21 B31": 1, "A0 B12 B32": 1, "A0 B12 B13": 1, "A0 B21 B23": 1,
    "A1 B21 B31": 1, "A1 B12 B13": 1, "A1 B12 B32": -1, "A1 B21 B23": -1,
}  # fmt: skip


def pm_behavior() -> Behavior:
    g = generalized_bell(alice_side(2), peres_mermin())
    return behavior_from_correlators(g, {frozenset(k.split()): v for k, v in PM_CORRELATORS.items()})


def pm_counterexample() -> tuple[Behavior, Report]:
    """An NSND behavior maximal for both the PM and CHSH inequalities, breaking the trade-off."""
    b = pm_behavior()
    ncv = evaluate(pm_noncontextuality(), bob_marginal(b))
    chv = evaluate(pm_chsh(), b)
    t = check_quantifier_tradeoff(b)
    # the polytope analogue of "several maximizers": vertices of the optimal ND face
    face = enumerate_vertices(nd_hrep(peres_mermin()).with_equality(pm_noncontextuality().coefficients(), 6))
    ok = b.is_nsnd and ncv == 6 and chv == 4 and (t.nlf, t.cf, t.nclf) == (1, 1, 1) and not t.holds
    return b, Report(
        "pm-counterexample",
        ok,
        {
            "nsnd": b.is_nsnd,
            "pm_value": ncv,
            "pm_bound": pm_noncontextuality().classical_bound,
            "chsh_value": chv,
            "NLF": t.nlf,
            "CF": t.cf,
            "NClF": t.nclf,
            "tradeoff_holds": t.holds,
            "pm_nd_maximizing_vertices": len(face),
        },
        [],
        [_cert(c) for c in t.certificates],
    )


# -- sampled equivalences -------------------------------------------------------------------

def random_mixture(v: VPolytope, rng: random.Random, max_parts: int = 4, max_weight: int = 9) -> Behavior:
    k = rng.randint(1, max_parts)
    idx = rng.sample(range(len(v)), k)
    w = [rng.randint(1, max_weight) for _ in idx]
    total = sum(w)
    return mix([v.behavior(i) for i in idx], [Fraction(x, total) for x in w])


def check_quantifier_tradeoff_sample(n: int = 3, count: int = 1000, seed: int = 0, vertices: VPolytope | None = None) -> Report:
    """NLF + CF <= NClF on seeded rational mixtures of NSND vertices, with exact certificates."""
    g = ncycle_scenario(n)
    v = vertices if vertices is not None else nsnd_vertices(g)
    bob_v = ncycle_nd_vertices(n)
    rng = random.Random(seed)
    fails, bad_certs = [], 0
    worst = None
    for k in range(count):
        b = random_mixture(v, rng)
        t = check_quantifier_tradeoff(b, bob_v)
        if not all(c.verify(b if c.kind != "CF" else bob_marginal(b)) for c in t.certificates):
            bad_certs += 1
        slack = t.nclf - t.nlf - t.cf
        if worst is None or slack < worst:
            worst = slack
        if not t.holds:
            fails.append({"sample": k, **t.as_dict()})
    return Report(
        f"quantifier-tradeoff[n={n}]",
        not fails and bad_certs == 0,
        {"samples": count, "seed": seed, "violations": len(fails), "bad_certificates": bad_certs, "min_slack": worst},
        fails[:20],
    )


def _gbell_samples(g: GeneralizedBellScenario, rng: random.Random, count: int) -> list[NormalizedInequality]:
    """Random CHSH-type inequalities with outcome flips, normalized; degenerate draws are skipped."""
    n = len(g.bob.measurements)
    out = []
    while len(out) < count:
        variant = rng.choice(GENERALIZED_CHSH_VARIANTS)
        i, j = rng.sample(range(n), 2)
        base = chsh_generalized(variant, i=i, j=j, scenario=g)
        flips = [m for m in g.measurement_ids if rng.random() < 0.3]
        try:
            out.append(normalize(relabel(base, flips=flips)))
        except DegenerateInequalityError:
            continue
    return out


def check_tradeoff_equivalence(n: int = 3, samples: int = 12, seed: int = 0, vertices: VPolytope | None = None) -> Report:
    """Vertex criterion versus normalized-inequality trade-off, decided on the same vertex list.

    ``no nonlocal-and-contextual vertex`` and ``S_gbell + S_nc <= 1 at every
    vertex for every sampled pair`` must agree.
    """
    g = ncycle_scenario(n)
    v = vertices if vertices is not None else nsnd_vertices(g)
    c = classify_vertices(g, v, seed=seed)
    rng = random.Random(seed)
    gbells = _gbell_samples(g, rng, samples)
    ncs = [normalize(i) for i in ncycle_nc_family(n)]
    rows = _bob_rows(v, g)
    den = v.denominators
    worst = None
    for sg in gbells:
        gv = _values(v.numerators, den, sg.base.coefficients())
        for sn in ncs:
            nv = _values(rows, den, sn.base.coefficients())
            for a, b in zip(gv, nv):
                s = (a + sg.shift) * sg.scale + (b + sn.shift) * sn.scale
                if worst is None or s > worst:
                    worst = s
    vertex_side = c.counts["nonlocal_and_contextual"] == 0
    ineq_side = worst <= 1
    return Report(
        f"tradeoff-equivalence[n={n}]",
        vertex_side == ineq_side and vertex_side,
        {
            "vertices": len(v),
            "pairs": len(gbells) * len(ncs),
            "no_nonlocal_contextual_vertex": vertex_side,
            "max_tradeoff_sum": worst,
            "tradeoff_holds": ineq_side,
        },
        [{"gbell": str(sg), "nc": str(sn)} for sg in gbells for sn in ncs][:8],
    )
