import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import as_tuples, plan_sets, reference_cycles, reference_pairwise
from mapfkit.conflict import (
    PAIRWISE_KINDS,
    GridMismatchError,
    cycle_conflicts,
    pairwise_conflicts,
    solution_conflicts,
)
from mapfkit.model import PEBBLE_MOTION, SEARCH_BASED, ConflictKind, Plan, make_grid

V, E, F, S, C = (ConflictKind.VERTEX, ConflictKind.EDGE, ConflictKind.FOLLOWING,
                 ConflictKind.SWAPPING, ConflictKind.CYCLE)

a, b, c, d, e = (0, 0), (1, 0), (2, 0), (3, 0), (4, 0)


def kinds_at(conflicts):
    return sorted((x.kind.value, x.time) for x in conflicts)


def test_head_on_swap():
    found = pairwise_conflicts(Plan(0, (a, b)), Plan(1, (b, a)))
    assert kinds_at(found) == [("following", 0), ("following", 0), ("swapping", 0)]


def test_vertex_without_edge():
    u, v, w, z, y = (0, 1), (1, 1), (2, 1), (1, 0), (1, 2)
    found = pairwise_conflicts(Plan(0, (u, v, w)), Plan(1, (z, v, y)))
    assert [(x.kind, x.time, x.vertices) for x in found] == [(V, 1, (v,))]


def test_stay_at_target_vertex_conflict():
    p1 = Plan(0, ((1, 1), (1, 0)))
    p2 = Plan(1, ((3, 0), (2, 0), (1, 0), (0, 0)))
    stay = pairwise_conflicts(p1, p2, {V}, "stay")
    assert [(x.kind, x.time, x.vertices) for x in stay] == [(V, 2, ((1, 0),))]
    assert pairwise_conflicts(p1, p2, {V}, "disappear") == []


def test_edge_conflict_is_co_traversal():
    found = pairwise_conflicts(Plan(0, (a, b, c)), Plan(1, (d, b, c)), {E})
    assert [(x.time, x.vertices) for x in found] == [(1, (b, c))]


def test_cycle_requires_set_detector():
    with pytest.raises(ValueError):
        pairwise_conflicts(Plan(0, (a,)), Plan(1, (b,)), {C})


def test_grid_mismatch():
    g1, g2 = make_grid(3, 1), make_grid(3, 2)
    with pytest.raises(GridMismatchError):
        pairwise_conflicts(Plan(0, (a,), g1), Plan(1, (b,), g2))
    # equal grids built separately are the same grid
    pairwise_conflicts(Plan(0, (a,), g1), Plan(1, (b,), make_grid(3, 1)))


def test_three_agent_rotation_on_abstract_triangle():
    # detection does not consult a grid, so a triangle of abstract vertices works
    found = cycle_conflicts([Plan(0, (a, b)), Plan(1, (b, c)), Plan(2, (c, a))])
    assert [(x.kind, x.time, x.agents) for x in found] == [(C, 0, (0, 1, 2))]


def test_four_agent_rotation():
    p, q, r, s = (0, 0), (1, 0), (1, 1), (0, 1)
    plans = [Plan(0, (p, q)), Plan(1, (q, r)), Plan(2, (r, s)), Plan(3, (s, p))]
    found = cycle_conflicts(plans)
    assert [(x.kind, x.time, x.agents) for x in found] == [(C, 0, (0, 1, 2, 3))]
    assert found[0].vertices == (p, q, r, s)


def test_rotation_listed_from_smallest_agent():
    p, q, r, s = (0, 0), (1, 0), (1, 1), (0, 1)
    plans = [Plan(0, (r, s)), Plan(1, (p, q)), Plan(2, (s, p)), Plan(3, (q, r))]
    (found,) = cycle_conflicts(plans)
    assert found.agents == (0, 2, 1, 3)


def test_two_agent_cycle_is_swap():
    found = cycle_conflicts([Plan(0, (a, b)), Plan(1, (b, a))])
    assert {(x.kind, x.agents) for x in found} == {(C, (0, 1)), (S, (0, 1))}


def test_waiting_agents_never_rotate():
    assert cycle_conflicts([Plan(0, (a, a, a)), Plan(1, (b, b)), Plan(2, (c,))]) == []


def test_disjoint_paths_valid_under_every_profile():
    plans = [Plan(0, ((0, 0), (1, 0))), Plan(1, ((0, 2), (1, 2)))]
    assert solution_conflicts(plans, SEARCH_BASED) == []
    assert solution_conflicts(plans, PEBBLE_MOTION) == []


def test_following_allowed_by_search_profile_only():
    plans = [Plan(0, (a, b, c)), Plan(1, (b, c, d))]
    assert solution_conflicts(plans, SEARCH_BASED) == []
    found = solution_conflicts(plans, PEBBLE_MOTION)
    assert [(x.kind, x.agents) for x in found] == [(F, (0, 1)), (F, (0, 1))]
    assert {x.time for x in found} == {0, 1}


@given(plan_sets(2, 2), st.sampled_from(["stay", "disappear"]))
def test_pairwise_matches_definitions(data, behavior):
    _, (p, q) = data
    found = pairwise_conflicts(p, q, PAIRWISE_KINDS, behavior)
    assert as_tuples(found) == reference_pairwise(p.locations, q.locations, 0, 1, behavior == "stay")
    assert len(found) == len(as_tuples(found))


@given(plan_sets(2, 2), st.sampled_from(["stay", "disappear"]))
def test_pairwise_symmetry(data, behavior):
    _, (p, q) = data
    fwd = pairwise_conflicts(p, q, PAIRWISE_KINDS, behavior)
    bwd = pairwise_conflicts(q, p, PAIRWISE_KINDS, behavior)
    assert fwd == bwd


@given(plan_sets(2, 4), st.sampled_from(["stay", "disappear"]))
def test_cycles_match_brute_force(data, behavior):
    _, plans = data
    found = cycle_conflicts(plans, behavior)
    cycles = {(x.time, x.agents) for x in found if x.kind is C}
    assert cycles == reference_cycles([p.locations for p in plans], behavior == "stay")


@given(plan_sets(2, 4), st.sampled_from(["stay", "disappear"]))
def test_dominance(data, behavior):
    _, plans = data
    pair = set()
    for i in range(len(plans)):
        for j in range(i + 1, len(plans)):
            pair |= set(pairwise_conflicts(plans[i], plans[j], PAIRWISE_KINDS, behavior))
    cyc = cycle_conflicts(plans, behavior)
    vertex_at = {(x.time, x.agents) for x in pair if x.kind is V}
    following = {(x.time, x.agents) for x in pair if x.kind is F}
    for x in pair:
        if x.kind is E:
            assert (x.time, x.agents) in vertex_at
        if x.kind is S:
            i, j = x.agents
            assert {(x.time, (i, j)), (x.time, (j, i))} <= following
    for x in cyc:
        n = len(x.agents)
        for m in range(n):
            assert (x.time, (x.agents[m], x.agents[(m + 1) % n])) in following
    swaps = {(x.time, x.agents) for x in pair if x.kind is S}
    two_cycles = {(x.time, x.agents) for x in cyc if x.kind is C and len(x.agents) == 2}
    assert swaps == two_cycles


@given(plan_sets(2, 3), st.sets(st.sampled_from(list(ConflictKind))))
def test_solution_conflicts_monotone_in_forbidden_set(data, kinds):
    from mapfkit.model import SemanticsProfile

    _, plans = data
    small = solution_conflicts(plans, SemanticsProfile(frozenset(kinds)))
    large = solution_conflicts(plans, PEBBLE_MOTION)
    assert set(small) <= set(large)
