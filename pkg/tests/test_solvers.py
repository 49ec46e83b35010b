import time

import pytest
from hypothesis import given, settings

from helpers import instances
from mapfkit.model import SEARCH_BASED, Instance, Plan, SemanticsProfile, Solution, make_grid
from mapfkit.oracle import brute_force_optimal
from mapfkit.solvers import (
    Constraint,
    ConstraintTable,
    SolverBudget,
    Status,
    cbs,
    prioritized,
    space_time_astar,
)
from mapfkit.solvers.joint_astar import joint_astar
from mapfkit.validate import validate

CORRIDOR = make_grid(3, 1)
CROSSING = Instance(make_grid(3, 3), ((0, 1), (1, 0)), ((2, 1), (1, 2)))


def test_astar_shortest_path():
    p = space_time_astar(CORRIDOR, (0, 0), (2, 0))
    assert p.locations == ((0, 0), (1, 0), (2, 0))


def test_astar_waits_for_vertex_constraint():
    p = space_time_astar(CORRIDOR, (0, 0), (2, 0), [Constraint.at(0, (1, 0), 1)])
    assert len(p) == 3
    assert p.locations[1] == (0, 0)


def test_astar_leaves_and_returns():
    p = space_time_astar(CORRIDOR, (1, 0), (1, 0), [Constraint.at(0, (1, 0), 2)])
    assert len(p) >= 3
    assert p.locations[2] != (1, 0) and p.locations[-1] == (1, 0)
    assert len(p) == 3


def test_astar_edge_constraint():
    g = make_grid(2, 2)
    p = space_time_astar(g, (0, 0), (1, 0), [Constraint.move(0, (0, 0), (1, 0), 0)])
    assert len(p) == 2


def test_astar_no_path_and_timeout():
    g = make_grid(3, 1, {(1, 0)})
    assert space_time_astar(g, (0, 0), (2, 0)) is Status.NO_PATH
    assert space_time_astar(CORRIDOR, (0, 0), (2, 0), [Constraint.at(0, (0, 0), 0)]) is Status.NO_PATH
    big = make_grid(30, 30)
    assert space_time_astar(big, (0, 0), (29, 29), budget=SolverBudget(time.monotonic() - 1)) is Status.TIMEOUT
    assert space_time_astar(big, (0, 0), (29, 29), budget=SolverBudget(node_limit=5)) is Status.TIMEOUT


def test_astar_parked_target_blocks_goal():
    table = ConstraintTable((), {(2, 0): 0})
    assert space_time_astar(CORRIDOR, (0, 0), (2, 0), table) is Status.NO_PATH


def test_astar_onward_constraint_detours():
    grid = make_grid(3, 2)
    p = space_time_astar(grid, (0, 0), (2, 0), [Constraint.from_time(0, (1, 0), 0)])
    assert (1, 0) not in p.locations and len(p.locations) == 5
    with pytest.raises(ValueError):
        Constraint(0, 1, (0, 0), (1, 0), onward=True)


def test_cbs_passes_parked_agent_in_dead_end():
    # the parked agent must be walked out of a dead-end corridor; 23 is the oracle optimum
    grid = make_grid(5, 3, {(1, 0), (3, 1), (2, 2)})
    inst = Instance(grid, ((3, 0), (2, 0), (1, 1)), ((3, 0), (4, 0), (2, 1)))
    res = cbs(inst, SEARCH_BASED, SolverBudget.seconds(60))
    assert res.solved and res.cost == 23 and res.extra["merges"] >= 1
    assert validate(inst, res.solution, SEARCH_BASED).valid


def test_target_branching_keeps_revisits():
    # agent 1 passes its target at t=1 and returns at t=3; optimum 8
    inst = Instance(make_grid(2, 4, [(0, 2)]), ((1, 1), (1, 2)), ((0, 3), (1, 1)))
    res = cbs(inst, SEARCH_BASED, SolverBudget.seconds(20), merge_threshold=None)
    assert res.solved and res.cost == 8


def test_arrive_after_allows_visits_before():
    grid = make_grid(3, 1)
    table = ConstraintTable([Constraint.arrive_after(0, (1, 0), 3)])
    p = space_time_astar(grid, (1, 0), (1, 0), table)
    assert len(p.locations) - 1 == 4 and p.locations[0] == (1, 0)


def test_joint_astar_corridor_swap_via_side_cell():
    grid = make_grid(3, 2, [(0, 1), (2, 1)])
    tables = [ConstraintTable(), ConstraintTable()]
    paths = joint_astar(grid, [(0, 0), (2, 0)], [(2, 0), (0, 0)], tables, horizon=20)
    inst = Instance(grid, ((0, 0), (2, 0)), ((2, 0), (0, 0)))
    sol = Solution(tuple(Plan(i, p, grid) for i, p in enumerate(paths)))
    assert validate(inst, sol, SEARCH_BASED).valid
    assert sum(len(p) - 1 for p in paths) == brute_force_optimal(inst, SEARCH_BASED).cost


def test_joint_astar_respects_member_constraints():
    grid = make_grid(3, 1)
    tables = [ConstraintTable([Constraint.at(0, (1, 0), 1)]), ConstraintTable()]
    paths = joint_astar(grid, [(0, 0), (2, 0)], [(1, 0), (2, 0)], tables, horizon=10)
    assert paths[0][1] != (1, 0) and paths[1] == ((2, 0),)
    assert joint_astar(grid, [(0, 0), (2, 0)], [(2, 0), (0, 0)], [ConstraintTable()] * 2, horizon=10) is Status.NO_PATH


def test_constraint_time_nonnegative():
    with pytest.raises(ValueError):
        Constraint.at(0, (0, 0), -1)


@given(instances(5, 1))
def test_astar_unconstrained_cost_is_bfs(inst):
    s, t = inst.sources[0], inst.targets[0]
    p = space_time_astar(inst.grid, s, t)
    assert len(p) == inst.grid.bfs_distances(s)[t]
    assert p.is_canonical()


def test_prioritized_disjoint_corridors():
    g = make_grid(3, 2)
    inst = Instance(g, ((0, 0), (0, 1)), ((2, 0), (2, 1)))
    res = prioritized(inst)
    assert res.solved and res.cost == 4


def test_prioritized_crossing():
    res = prioritized(CROSSING, [0, 1])
    assert res.solved and res.cost == 5
    assert validate(CROSSING, res.solution, SEARCH_BASED).valid


def test_prioritized_parked_agent_blocks_corridor():
    g = make_grid(3, 1)
    # agent 0 starts parked on (1, 0), the only way through for agent 1
    inst = Instance(g, ((1, 0), (0, 0)), ((1, 0), (2, 0)))
    res = prioritized(inst, [0, 1])
    assert res.status is Status.FAILURE


def test_prioritized_rejects_bad_order_and_profile():
    with pytest.raises(ValueError):
        prioritized(CROSSING, [0, 0])
    with pytest.raises(ValueError):
        prioritized(CROSSING, profile=SemanticsProfile(frozenset(), "disappear"))


def test_cbs_single_agent():
    inst = Instance(make_grid(4, 4, {(1, 1)}), ((0, 0),), ((3, 3),))
    res = cbs(inst)
    assert res.solved and res.cost == 6


def test_cbs_crossing():
    res = cbs(CROSSING)
    assert res.solved and res.cost == 5
    assert validate(CROSSING, res.solution, SEARCH_BASED).valid


def test_cbs_corridor_swap_unsolvable():
    inst = Instance(make_grid(2, 1), ((0, 0), (1, 0)), ((1, 0), (0, 0)))
    assert cbs(inst).status is Status.UNSOLVABLE


def test_cbs_rejects_other_profiles():
    with pytest.raises(ValueError):
        cbs(CROSSING, SemanticsProfile.parse("vertex,edge,following"))


def test_cbs_timeout():
    g = make_grid(8, 8)
    inst = Instance(g, tuple((x, 0) for x in range(8)), tuple((7 - x, 7) for x in range(8)))
    assert cbs(inst, budget=SolverBudget(time.monotonic() - 1)).status is Status.TIMEOUT


def test_cbs_parked_agent_must_move_aside():
    # agent 0 starts on its target in the middle of agent 1's only corridor
    g = make_grid(3, 2, {(0, 1), (2, 1)})
    inst = Instance(g, ((1, 0), (0, 0)), ((1, 0), (2, 0)))
    res = cbs(inst)
    assert res.solved
    assert res.cost == brute_force_optimal(inst, SEARCH_BASED).cost == 4


@pytest.mark.parametrize(
    "options",
    [
        {},
        {"merge_threshold": None},
        {"merge_threshold": 0},
        {"prioritize_conflicts": True, "bypass": True, "avoid_conflicts": True},
    ],
)
@settings(max_examples=60)
@given(inst=instances(4, 3))
def test_cbs_matches_oracle(inst, options):
    oracle = brute_force_optimal(inst, SEARCH_BASED)
    if not oracle.solved:
        return
    res = cbs(inst, budget=SolverBudget.seconds(20), **options)
    assert res.solved and res.cost == oracle.cost
    assert validate(inst, res.solution, SEARCH_BASED).valid
    pri = prioritized(inst, budget=SolverBudget.seconds(20))
    if pri.solved:
        assert validate(inst, pri.solution, SEARCH_BASED).valid
        assert res.cost <= pri.cost
