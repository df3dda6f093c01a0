import pytest

from gbell.errors import FormatError, InvalidScenarioError, UnsupportedCompositionError
from gbell.scenario import (
    ContextualityScenario,
    Measurement,
    alice_side,
    dump_scenario,
    generalized_bell,
    load_scenario,
    n_cycle,
    peres_mermin,
    scenario_from_dict,
    scenario_to_dict,
)


def test_five_cycle_shape():
    s = n_cycle(5)
    assert len(s.measurements) == 5
    assert len(s.contexts) == 5
    assert all(len(c) == 2 for c in s.contexts)


def test_three_cycle_contexts():
    assert n_cycle(3).contexts == (("B0", "B1"), ("B1", "B2"), ("B2", "B0"))


@pytest.mark.parametrize("n", [-1, 0, 1, 2])
def test_short_cycle_rejected(n):
    with pytest.raises(InvalidScenarioError):
        n_cycle(n)


def test_peres_mermin_shape():
    s = peres_mermin()
    assert len(s.measurements) == 9
    assert len(s.contexts) == 6
    assert all(len(c) == 3 for c in s.contexts)
    for m in s.measurement_ids:
        assert len(s.contexts_containing({m})) == 2


def test_alice_side():
    assert alice_side(2).measurement_ids == ("A0", "A1")
    assert len(alice_side(7).contexts) == 7
    with pytest.raises(InvalidScenarioError):
        alice_side(0)


def test_joint_counts():
    g = generalized_bell(alice_side(2), n_cycle(5))
    assert len(g.contexts) == 10
    assert g.dim == 80
    g = generalized_bell(alice_side(2), peres_mermin())
    assert len(g.contexts) == 12
    assert all(2 ** len(c) == 16 for c in g.contexts)


def test_joint_context_order_is_alice_major():
    g = generalized_bell(alice_side(2), n_cycle(3))
    assert g.contexts[0] == ("A0", "B0", "B1")
    assert g.contexts[3] == ("A1", "B0", "B1")
    assert g.joint_index(1, 2) == 5


def test_composition_needs_singleton_alice():
    with pytest.raises(UnsupportedCompositionError):
        generalized_bell(n_cycle(3), n_cycle(4))


def test_overlapping_labels_rejected():
    with pytest.raises(UnsupportedCompositionError):
        generalized_bell(alice_side(1), ContextualityScenario((Measurement("A0"), Measurement("B1")), (("A0", "B1"),)))


def test_index_is_lexicographic_with_plus_first():
    s = n_cycle(3)
    assert [s.index(0, o) for o in [(1, 1), (1, -1), (-1, 1), (-1, -1)]] == [0, 1, 2, 3]
    assert s.index(2, (1, 1)) == 8


@pytest.mark.parametrize(
    "contexts",
    [((),), (("B0", "B0"),), (("B0", "X"),), (("B0", "B1"), ("B1", "B0")), (("B0",), ("B0", "B1"))],
)
def test_malformed_contexts(contexts):
    with pytest.raises(InvalidScenarioError):
        ContextualityScenario((Measurement("B0"), Measurement("B1")), contexts)


def test_unused_measurement_rejected():
    with pytest.raises(InvalidScenarioError):
        ContextualityScenario((Measurement("B0"), Measurement("B1")), (("B0",),))


@pytest.mark.parametrize("s", [n_cycle(4), peres_mermin(), generalized_bell(alice_side(3), n_cycle(3))])
def test_file_round_trip(tmp_path, s):
    assert scenario_from_dict(scenario_to_dict(s)) == s
    dump_scenario(s, tmp_path / "s.json")
    assert load_scenario(tmp_path / "s.json") == s


def test_bad_files(tmp_path):
    with pytest.raises(FormatError):
        scenario_from_dict({"format_version": 99})
    with pytest.raises(FormatError):
        scenario_from_dict({"format_version": 1, "kind": "other"})
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(FormatError):
        load_scenario(tmp_path / "bad.json")
