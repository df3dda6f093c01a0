"""Acceptance criteria 1-11, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion is printed in the terminal summary.  ``--long`` adds the n=5
enumeration.
"""
import math
from fractions import Fraction

import pytest

from gbell.behavior import bob_marginal, check_nsnd, mix
from gbell.geometry import (
    enumerate_vertices,
    local_vertices,
    max_over_points,
    maximize_linear,
    nd_hrep,
    ncycle_contextual_vertices,
    ncycle_nd_vertices,
    nsnd_hrep,
)
from gbell.inequalities import (
    chained,
    chsh_generalized,
    chsh_usual,
    evaluate,
    kcbs,
    ncycle_nc_family,
    pm_chsh,
    pm_noncontextuality,
)
from gbell.quantifiers import (
    check_quantifier_tradeoff,
    contextual_fraction,
    nonclassical_fraction,
    nonlocal_fraction,
)
from gbell.quantum import (
    classicality_value,
    conditional_pentagon_value,
    pentagon_setup,
    rationalize,
)
from gbell.scenario import n_cycle
from gbell.verify import (
    check_max_violation_implies_nc,
    check_quantifier_tradeoff_sample,
    check_result1,
    check_result4,
    classify_vertices,
    ncycle_scenario,
    pm_behavior,
)

FIVE_MINUS_4_ROOT5 = 5 - 4 * math.sqrt(5)


# -- 1, 2: no nonlocal-and-contextual NSND vertex ----------------------------------------

@pytest.mark.criterion(1)
def test_no_nonlocal_contextual_vertex_n3(nsnd3):
    c = classify_vertices(ncycle_scenario(3), nsnd3)
    assert c.counts["vertices"] == 1128
    assert c.counts["nonlocal_and_contextual"] == 0
    assert c.cross_checks_agree


@pytest.mark.criterion(2)
def test_no_nonlocal_contextual_vertex_n4(nsnd4):
    c = classify_vertices(ncycle_scenario(4), nsnd4)
    assert c.counts["vertices"] == 53856
    assert c.counts["nonlocal_and_contextual"] == 0
    assert c.cross_checks_agree


@pytest.mark.criterion(2)
@pytest.mark.long
def test_no_nonlocal_contextual_vertex_n5(tmp_path):
    r = check_result1(5, long=True, checkpoint=tmp_path / "n5.npz")
    assert r.passed, r.summary


# -- 3: monogamy ----------------------------------------------------------------------------

@pytest.mark.criterion(3)
def test_monogamy_chsh_plus_kcbs():
    g = ncycle_scenario(5)
    h = nsnd_hrep(g)
    chsh = chsh_usual(0, 2, scenario=g)
    nc = kcbs().lifted(g)
    assert maximize_linear(h, (chsh + nc).coefficients()).value == 5
    assert maximize_linear(h, chsh.coefficients()).value == 4
    assert maximize_linear(h, nc.coefficients()).value == 5


# -- 4: equal mixtures of contextual vertices ------------------------------------------

@pytest.mark.criterion(4)
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_equal_mixtures_are_noncontextual(n):
    ctx = ncycle_contextual_vertices(n)
    assert len(ctx) == 2 ** (n - 1)
    half = Fraction(1, 2)
    for i in range(len(ctx)):
        for j in range(i + 1, len(ctx)):
            cert = contextual_fraction(mix([ctx[i], ctx[j]], [half, half]))
            assert cert.value == 0
            assert cert.verify(mix([ctx[i], ctx[j]], [half, half]))


# -- 5: unique ND maximizers and product form ---------------------------------------------

@pytest.mark.criterion(5)
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_unique_nd_maximizer(n):
    nd = ncycle_nd_vertices(n)
    for ineq in ncycle_nc_family(n):
        top, arg = max_over_points(nd, ineq.coefficients())
        assert top == n
        assert len(arg) == 1


@pytest.mark.criterion(5)
def test_contextual_marginal_vertices_are_product_n3(nsnd3):
    r = check_result4(3, nsnd3)
    assert r.passed, r.summary
    assert r.summary["qualifying_vertices"] > 0


@pytest.mark.criterion(5)
def test_contextual_marginal_vertices_are_product_n4(nsnd4):
    r = check_result4(4, nsnd4)
    assert r.passed, r.summary
    assert r.summary["qualifying_vertices"] > 0


# -- 6: maximal generalized CHSH violations -------------------------------------------------

@pytest.mark.criterion(6)
@pytest.mark.parametrize("n", [4, 5])
@pytest.mark.parametrize("family", ["pair-pair", "single-pair"])
def test_max_violation_forces_nc_marginal(family, n):
    r = check_max_violation_implies_nc(family, n)
    s = r.summary
    assert s["nsnd_max"] == 4
    assert s["local_max"] == 2
    assert s["maximizing_vertices"] > 0
    assert s["contextual_marginals"] == 0
    if family == "pair-pair":
        assert set(s["forced_zero_correlators"]) == {"A0", "A1", "B0 B1", "B2 B3"}
        assert all(v == ["0"] for v in s["forced_zero_correlators"].values())
    assert r.passed


@pytest.mark.criterion(6)
def test_local_max_of_pair_pair_is_two():
    i = chsh_generalized("pair-pair", n=4)
    top, _ = max_over_points(local_vertices(i.scenario), i.coefficients())
    assert top == 2


# -- 7: chained ---------------------------------------------------------------------------

@pytest.mark.criterion(7)
def test_chained_three():
    i = chained(3)
    g = i.scenario
    assert maximize_linear(nsnd_hrep(g), i.coefficients()).value == 6
    top, _ = max_over_points(local_vertices(g), i.coefficients())
    assert top == 4
    r = check_max_violation_implies_nc("chained", 3)
    assert r.summary["contextual_marginals"] == 0
    assert r.passed


# -- 8: separable pentagon construction --------------------------------------------------

@pytest.mark.criterion(8)
def test_pentagon_quantum_behavior():
    b = pentagon_setup().behavior()
    assert check_nsnd(b, 1e-12) == []
    assert abs(conditional_pentagon_value(b, 1) - FIVE_MINUS_4_ROOT5) <= 1e-9
    assert abs(classicality_value(b) - FIVE_MINUS_4_ROOT5) <= 1e-9
    e = rationalize(b).behavior
    assert e.is_nsnd
    assert nonlocal_fraction(e).value == 0
    assert contextual_fraction(bob_marginal(e)).value == 0
    assert nonclassical_fraction(e).value > 0


# -- 9: Peres-Mermin counterexample ---------------------------------------------------------

@pytest.mark.criterion(9)
def test_pm_counterexample():
    b = pm_behavior()
    assert check_nsnd(b) == []
    assert evaluate(pm_noncontextuality(), bob_marginal(b)) == 6
    assert evaluate(pm_chsh(), b) == 4
    t = check_quantifier_tradeoff(b)
    assert (t.nlf, t.cf, t.nclf) == (1, 1, 1)
    assert t.nlf + t.cf == 2 > t.nclf
    assert not t.holds


# -- 10: quantifier trade-off on random mixtures ------------------------------------------

@pytest.mark.criterion(10)
def test_quantifier_tradeoff_on_mixtures(nsnd3):
    r = check_quantifier_tradeoff_sample(3, count=1000, seed=20240601, vertices=nsnd3)
    assert r.summary["violations"] == 0
    assert r.summary["bad_certificates"] == 0
    assert r.passed


# -- 11: oracles ------------------------------------------------------------------------

@pytest.mark.criterion(11)
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_dd_matches_closed_form(n):
    v = enumerate_vertices(nd_hrep(n_cycle(n)))
    assert len(v) == 2**n + 2 ** (n - 1)
    assert v.as_set() == ncycle_nd_vertices(n).as_set()


@pytest.mark.criterion(11)
def test_lp_matches_vertex_sweep(nsnd3):
    g = ncycle_scenario(3)
    h = nsnd_hrep(g)
    functionals = [
        chsh_generalized("pair-single", n=3).coefficients(),
        chsh_generalized("single-pair", n=3).coefficients(),
        ncycle_nc_family(3)[0].lifted(g).coefficients(),
        tuple(Fraction((7 * k) % 11 - 5, 3) for k in range(g.dim)),
    ]
    for f in functionals:
        assert maximize_linear(h, f).value == max_over_points(nsnd3, f)[0]
    nd5 = nd_hrep(n_cycle(5))
    f = kcbs().coefficients()
    assert maximize_linear(nd5, f).value == max_over_points(ncycle_nd_vertices(5), f)[0] == 5


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
