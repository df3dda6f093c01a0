import math
from fractions import Fraction

import numpy as np
import pytest

from gbell.behavior import bob_marginal, correlator, deterministic_behavior, uniform_behavior
from gbell.errors import IncompatibleContextError, ScenarioMismatchError
from gbell.quantifiers import contextual_fraction, nonclassical_fraction
from gbell.quantum import (
    DensityOperator,
    DichotomicObservable,
    behavior_from_state,
    classicality_value,
    conditional_pentagon_value,
    load_setup,
    dump_setup,
    noise_sweep,
    pentagon_cos2,
    pentagon_setup,
    pentagon_vectors,
    rational_approximation,
    rationalize,
    setup_from_dict,
    setup_to_dict,
    sweep_csv,
)
from gbell.scenario import alice_side, generalized_bell, n_cycle

Z = np.diag([1.0, -1.0])
X = np.array([[0.0, 1.0], [1.0, 0.0]])
I2 = np.eye(2)


def test_pentagon_geometry():
    assert math.isclose(pentagon_cos2(), math.cos(math.pi / 5) / (1 + math.cos(math.pi / 5)), abs_tol=1e-15)
    v = pentagon_vectors()
    for k in range(5):
        assert abs(np.vdot(v[k], v[k]) - 1) < 1e-12
        assert abs(np.vdot(v[k], v[(k + 1) % 5])) < 1e-12


def test_pentagon_marginal_means_vanish():
    b = pentagon_setup().behavior()
    assert abs(correlator(b, ("A0",))) < 1e-12


def test_pentagon_values():
    b = pentagon_setup().behavior()
    assert abs(classicality_value(b) - (5 - 4 * math.sqrt(5))) <= 1e-9
    assert abs(conditional_pentagon_value(b, 1) - (5 - 4 * math.sqrt(5))) <= 1e-9
    r = rationalize(b)
    assert r.radius <= 1e-12
    assert abs(float(nonclassical_fraction(r.behavior).value) - (math.sqrt(5) - 2)) <= 1e-9
    assert contextual_fraction(bob_marginal(r.behavior)).value == 0


def test_maximally_mixed_is_uniform():
    rho = DensityOperator.maximally_mixed(4)
    bob = [DichotomicObservable.from_operator(op) for op in (np.kron(Z, I2), np.kron(I2, Z), np.kron(X, I2), np.kron(I2, X))]
    b = behavior_from_state(rho, (), bob, n_cycle(4))
    assert np.allclose(b.probs, [float(p) for p in uniform_behavior(n_cycle(4)).probs], atol=1e-12)


def test_non_commuting_context_raises():
    bob = [DichotomicObservable.from_operator(op) for op in (Z, X, Z, X)]
    with pytest.raises(IncompatibleContextError):
        behavior_from_state(DensityOperator.maximally_mixed(2), (), bob, n_cycle(4))


def test_invalid_states_and_observables():
    with pytest.raises(ValueError):
        DensityOperator(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        DensityOperator(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        DichotomicObservable.from_operator(np.diag([1.0, 0.5]))


def test_classicality_on_deterministic_points():
    g = generalized_bell(alice_side(1), n_cycle(5))
    allplus = deterministic_behavior(g, {m: 1 for m in g.measurement_ids})
    assert classicality_value(allplus) == 13
    aminus = deterministic_behavior(g, {"A0": -1, **{f"B{k}": 1 for k in range(5)}})
    assert classicality_value(aminus) == -3
    with pytest.raises(ScenarioMismatchError):
        classicality_value(uniform_behavior(generalized_bell(alice_side(2), n_cycle(5))))


def test_rational_approximation():
    assert rational_approximation(0.5) == Fraction(1, 2)
    x = math.sqrt(5) - 2
    q = rational_approximation(x, 1e-12)
    assert abs(q - Fraction(x)) <= 1e-12
    assert q.denominator < 10**7


def test_rationalize_exact_behavior_is_unchanged():
    u = uniform_behavior(n_cycle(3))
    r = rationalize(u)
    assert r.behavior == u and r.radius == 0 and not r.repaired


def test_noise_sweep_endpoints():
    pts = noise_sweep(pentagon_setup(), [0.0, 1.0])
    assert pts[0].nclf == 0
    assert abs(pts[0].classicality + 5 / 3) < 1e-12
    assert abs(float(pts[1].nclf) - (math.sqrt(5) - 2)) <= 1e-9
    text = sweep_csv(pts)
    assert text.splitlines()[0] == "visibility,classicality,conditional,nclf,cf_bob"
    assert len(text.splitlines()) == 3


def test_setup_round_trip(tmp_path):
    q = pentagon_setup()
    again = setup_from_dict(setup_to_dict(q))
    assert np.allclose(again.behavior().probs, q.behavior().probs, atol=0)
    dump_setup(q, tmp_path / "q.json")
    assert np.allclose(load_setup(tmp_path / "q.json").behavior().probs, q.behavior().probs, atol=0)
