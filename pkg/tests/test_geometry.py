import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gbell.behavior import uniform_behavior
from gbell.errors import BudgetExceededError, InfeasibleError, PreconditionError, UnboundedPolytopeError
from gbell.geometry import (
    HPolytope,
    VPolytope,
    bob_nd_vertices,
    deterministic_vertices,
    dumps_ieq,
    dumps_poi,
    enumerate_vertices,
    loads_ieq,
    loads_poi,
    local_vertices,
    max_over_points,
    maximize_linear,
    nd_hrep,
    ncycle_nd_vertices,
    NCycleVertexSpec,
    nsnd_hrep,
    read_ieq,
    read_poi,
    simplex_max,
    verify_vertices,
    write_ieq,
    write_poi,
)
from gbell.geometry.linalg import rank, solve_square
from gbell.inequalities import chsh_generalized, kcbs
from gbell.scenario import ContextualityScenario, Measurement, alice_side, generalized_bell, n_cycle, peres_mermin

F = Fraction


def _box_polytope(rows, dim):
    """``rows`` plus the box ``-2 <= x_i <= 2`` (keeps everything bounded)."""
    ineqs = [(tuple(F(v) for v in a), F(b)) for a, b in rows]
    for i in range(dim):
        e = [F(0)] * dim
        e[i] = F(1)
        ineqs.append((tuple(e), F(2)))
        e = [F(0)] * dim
        e[i] = F(-1)
        ineqs.append((tuple(e), F(2)))
    return HPolytope(dim, tuple(ineqs))


def _brute_force_vertices(h: HPolytope):
    """Every feasible point where ``dim`` independent inequalities are tight."""
    out = set()
    rows = h.inequalities
    for combo in itertools.combinations(range(len(rows)), h.dim):
        A = [list(rows[k][0]) for k in combo]
        if rank(A, h.dim) < h.dim:
            continue
        x = solve_square(A, [rows[k][1] for k in combo])
        if h.contains(x):
            out.add(tuple(x))
    return out


# -- H-representations -------------------------------------------------------------------

def test_three_cycle_hrep_counts():
    h = nd_hrep(n_cycle(3))
    assert h.dim == 12
    assert len(h.inequalities) == 12
    norm = [e for e in h.equalities if all(v >= 0 for v in e[0])]
    assert len(norm) == 3
    # three shared measurements, two values each
    assert len(h.equalities) - len(norm) == 6
    assert rank([list(a) + [b] for a, b in h.equalities], 13) == len(h.reduced().equalities)


def test_single_context_is_simplex():
    s = ContextualityScenario((Measurement("B0"), Measurement("B1")), (("B0", "B1"),))
    v = enumerate_vertices(nd_hrep(s))
    assert v.as_set() == {tuple(F(int(i == j)) for i in range(4)) for j in range(4)}


def test_pm_hrep_shape():
    h = nd_hrep(peres_mermin())
    assert h.dim == 48
    assert len(h.inequalities) == 48


def test_nsnd_dimension_and_members():
    g = generalized_bell(alice_side(2), n_cycle(3))
    h = nsnd_hrep(g)
    assert h.dim == 48
    assert h.contains(uniform_behavior(g).probs)
    for v in deterministic_vertices(g):
        assert h.contains(v)
    with pytest.raises(TypeError):
        nsnd_hrep(n_cycle(3))


# -- vertex lists ------------------------------------------------------------------------

def test_deterministic_counts():
    assert len(deterministic_vertices(n_cycle(5))) == 32
    g = generalized_bell(alice_side(2), n_cycle(5))
    v = deterministic_vertices(g)
    assert len(v) == 128
    assert verify_vertices(nsnd_hrep(g), v) == []


def test_ncycle_nd_counts():
    assert len(ncycle_nd_vertices(5)) == 48
    b = NCycleVertexSpec("contextual", (-1, -1, -1)).behavior()
    assert all(b.distribution(k) == (0, F(1, 2), F(1, 2), 0) for k in range(3))
    with pytest.raises(ValueError):
        NCycleVertexSpec("contextual", (1, -1, -1))


def test_local_vertex_count():
    g = generalized_bell(alice_side(2), n_cycle(3))
    assert len(local_vertices(g)) == 48


def test_bob_vertices_need_known_scenario():
    with pytest.raises(PreconditionError):
        bob_nd_vertices(peres_mermin())


def test_nsnd_three_cycle_regression():
    g = generalized_bell(alice_side(2), n_cycle(3))
    v = enumerate_vertices(nsnd_hrep(g))
    assert len(v) == 1128
    assert set(local_vertices(g).as_set()) <= v.as_set()


@settings(max_examples=25, deadline=None)
@given(
    st.integers(2, 3).flatmap(
        lambda d: st.tuples(
            st.just(d),
            st.lists(
                st.tuples(st.lists(st.integers(-3, 3), min_size=d, max_size=d), st.integers(-2, 4)),
                min_size=1,
                max_size=4,
            ),
        )
    )
)
def test_dd_matches_facet_saturation(data):
    dim, rows = data
    h = _box_polytope(rows, dim)
    brute = _brute_force_vertices(h)
    if not brute:
        with pytest.raises(InfeasibleError):
            enumerate_vertices(h)
        return
    assert enumerate_vertices(h).as_set() == brute


def test_unbounded_and_infeasible():
    ray = HPolytope(1, (((F(-1),), F(0)),))
    with pytest.raises(UnboundedPolytopeError):
        enumerate_vertices(ray)
    empty = HPolytope(1, (((F(1),), F(0)), ((F(-1),), F(-1))))
    with pytest.raises(InfeasibleError):
        enumerate_vertices(empty)


def test_budget_and_checkpoint_resume(tmp_path):
    h = nsnd_hrep(generalized_bell(alice_side(2), n_cycle(3)))
    ck = tmp_path / "dd.npz"
    with pytest.raises(BudgetExceededError):
        enumerate_vertices(h, budget=200, checkpoint=ck, checkpoint_interval=0)
    assert ck.exists()
    assert len(enumerate_vertices(h, checkpoint=ck)) == 1128


def test_vpolytope_canonical_equality():
    pts = [(F(1, 2), F(1, 2)), (1, 0), (F(2, 4), F(1, 2))]
    a = VPolytope.from_points(pts)
    b = VPolytope.from_points(list(reversed(pts)))
    assert len(a) == 2
    assert a == b


# -- LP --------------------------------------------------------------------------------

def test_simplex_small():
    # max x + y with x + 2y <= 4, 3x + y <= 6
    r = simplex_max([1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert r.value == F(14, 5)
    assert tuple(r.x) == (F(8, 5), F(6, 5))


def test_simplex_equalities_and_errors():
    assert simplex_max([1, 0], A_eq=[[1, 1]], b_eq=[F(1, 3)]).value == F(1, 3)
    with pytest.raises(InfeasibleError):
        simplex_max([1], A_eq=[[1]], b_eq=[-1])
    with pytest.raises(UnboundedPolytopeError):
        simplex_max([1, 1], A_ub=[[1, -1]], b_ub=[1])


def test_kcbs_max_is_five():
    r = maximize_linear(nd_hrep(n_cycle(5)), kcbs().coefficients())
    assert r.value == 5
    top, arg = max_over_points(ncycle_nd_vertices(5), kcbs().coefficients())
    assert top == 5 and len(arg) == 1
    assert tuple(r.point) == ncycle_nd_vertices(5).vertex(arg[0])


def test_pair_single_max_over_nsnd_five():
    i = chsh_generalized("pair-single", n=5)
    assert maximize_linear(nsnd_hrep(i.scenario), i.coefficients()).value == 4


def test_zero_functional():
    h = nd_hrep(n_cycle(4))
    r = maximize_linear(h, [0] * h.dim)
    assert r.value == 0
    assert h.contains(r.point)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=12, max_size=12))
def test_lp_agrees_with_vertex_sweep(coeffs):
    h = nd_hrep(n_cycle(3))
    v = ncycle_nd_vertices(3)
    assert maximize_linear(h, coeffs).value == max_over_points(v, coeffs)[0]


# -- PORTA files ----------------------------------------------------------------------------

def test_porta_round_trip(tmp_path):
    h = nd_hrep(n_cycle(4))
    text = dumps_ieq(h)
    again = loads_ieq(text)
    assert dumps_ieq(again) == text
    assert set(again.inequalities) == set(h.inequalities)
    v = ncycle_nd_vertices(4)
    write_poi(v, tmp_path / "c4.poi")
    write_ieq(h, tmp_path / "c4.ieq")
    assert read_poi(tmp_path / "c4.poi") == v
    assert dumps_poi(loads_poi(dumps_poi(v))) == dumps_poi(v)
    assert dumps_ieq(read_ieq(tmp_path / "c4.ieq")) == text


def test_porta_parses_geq_and_fractions():
    text = "DIM = 2\n\nINEQUALITIES_SECTION\n(1) x1+1/2x2 >= -1\n(2) -x1 <= 3\nEND\n"
    h = loads_ieq(text)
    assert h.inequalities[0] == ((F(-1), F(-1, 2)), F(1))
    assert loads_poi("DIM = 2\n\nCONV_SECTION\nEND\n").numerators.shape == (0, 2)


def test_integer_overflow_falls_back_to_objects():
    big = np.array([[2**40, 1], [1, 2**40]], dtype=object)
    v = VPolytope(big, np.array([2**41, 2**41], dtype=object))
    assert verify_vertices(HPolytope(2, ()), v) == []
