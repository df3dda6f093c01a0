import itertools
from fractions import Fraction

import pytest

from gbell.behavior import (
    Behavior,
    bob_marginal,
    deterministic_behavior,
    mix,
    product_behavior,
    uniform_behavior,
)
from gbell.errors import PreconditionError, ScenarioMismatchError
from gbell.geometry import local_vertices, ncycle_contextual_vertices
from gbell.inequalities import chsh_generalized, evaluate
from gbell.quantifiers import (
    certificate_from_dict,
    certificate_to_dict,
    check_quantifier_tradeoff,
    contextual_fraction,
    dump_certificate,
    nonclassical_fraction,
    nonlocal_fraction,
)
from gbell.scenario import alice_side, generalized_bell, n_cycle
from gbell.verify import nsnd_vertices, pm_behavior

G3 = generalized_bell(alice_side(2), n_cycle(3))
HALF = Fraction(1, 2)


def _pr_analogue(n=4):
    """An NSND vertex reaching 4 on the pair-single CHSH functional."""
    i = chsh_generalized("pair-single", n=n)
    v = nsnd_vertices(i.scenario) if n == 3 else None
    assert v is not None
    best = max(range(len(v)), key=lambda k: evaluate(i, v.behavior(k)))
    return v.behavior(best), i


def test_cf_of_deterministic_and_contextual_vertices():
    s = n_cycle(5)
    d = deterministic_behavior(s, {f"B{i}": 1 for i in range(5)})
    assert contextual_fraction(d).value == 0
    for v in ncycle_contextual_vertices(5)[:4]:
        c = contextual_fraction(v)
        assert c.value == 1
        assert c.verify(v)
        assert contextual_fraction(v, shortcut=False).value == 1


def test_cf_of_equal_mixture():
    a, b = ncycle_contextual_vertices(3)[:2]
    m = mix([a, b], [HALF, HALF])
    c = contextual_fraction(m)
    assert c.value == 0
    assert c.verify(m)


def test_cf_needs_bob_behavior():
    with pytest.raises(ScenarioMismatchError):
        contextual_fraction(uniform_behavior(G3))


def test_float_behavior_rejected():
    u = uniform_behavior(n_cycle(3))
    with pytest.raises(PreconditionError):
        contextual_fraction(Behavior(u.scenario, tuple(float(p) for p in u.probs)))


def test_nlf_of_product_is_zero():
    q = ncycle_contextual_vertices(3)[0]
    b = product_behavior([(HALF, HALF), (Fraction(1, 3), Fraction(2, 3))], q, G3)
    c = nonlocal_fraction(b)
    assert c.value == 0
    assert c.verify(b)


def test_pr_analogue_fractions():
    p, i = _pr_analogue(3)
    assert evaluate(i, p) == 4
    assert nonlocal_fraction(p).value == 1
    assert nonlocal_fraction(p, shortcut=False).value == 1
    loc = local_vertices(G3).behavior(0)
    m = mix([p, loc], [HALF, HALF])
    c = nonlocal_fraction(m)
    assert c.value <= HALF
    assert c.verify(m)


def test_nclf_of_classical_is_zero():
    b = deterministic_behavior(G3, {"A0": 1, "A1": -1, "B0": 1, "B1": -1, "B2": 1})
    assert nonclassical_fraction(b).value == 0
    t = check_quantifier_tradeoff(b)
    assert (t.nlf, t.cf, t.nclf) == (0, 0, 0)
    assert t.holds


def test_pm_quantifiers():
    t = check_quantifier_tradeoff(pm_behavior())
    assert (t.nlf, t.cf, t.nclf) == (1, 1, 1)
    assert not t.holds
    assert t.as_dict() == {"NLF": "1", "CF": "1", "NClF": "1", "holds": False}


@pytest.mark.parametrize("seed", range(5))
def test_tradeoff_on_mixtures_with_certificates(seed):
    import random

    from gbell.verify import random_mixture

    v = nsnd_vertices(G3)
    b = random_mixture(v, random.Random(seed))
    t = check_quantifier_tradeoff(b)
    assert t.holds
    nlf, cf, nclf = t.certificates
    assert nlf.verify(b)
    assert nclf.verify(b)
    assert cf.verify(bob_marginal(b))


def test_certificate_round_trip(tmp_path):
    a, b = ncycle_contextual_vertices(3)[:2]
    m = mix([a, b], [Fraction(1, 3), Fraction(2, 3)])
    c = contextual_fraction(m)
    again = certificate_from_dict(certificate_to_dict(c), m.scenario)
    assert again == c
    assert again.verify(m)
    dump_certificate(c, tmp_path / "c.json")
    assert (tmp_path / "c.json").read_text().startswith("{")


def test_non_nsnd_input_rejected():
    probs = list(uniform_behavior(G3).probs)
    probs[0] += Fraction(1, 8)
    probs[1] -= Fraction(1, 8)
    with pytest.raises(PreconditionError):
        nonlocal_fraction(Behavior(G3, tuple(probs)))


def test_local_behaviors_have_zero_nlf():
    v = local_vertices(G3)
    for k in itertools.islice(range(len(v)), 0, len(v), 7):
        assert nonlocal_fraction(v.behavior(k), shortcut=False).value == 0
