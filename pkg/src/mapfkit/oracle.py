"""Exhaustive optimal solver for tiny instances, under any semantics profile.

The search runs over joint states ``(time, positions, committed)``. An agent
standing on its target may *commit* to it: from then on it stays there
(stay-at-target) or is gone (disappear-at-target). Each joint step charges
every uncommitted agent one unit, so the accumulated cost is exactly the sum
of final-arrival times, or the makespan when only whole steps are charged.

Which joint steps are allowed is decided by :mod:`mapfkit.conflict` alone,
applied to the one-step plans the step induces. Nothing here shares code with
the search-based solvers: this is the ground truth they are tested against.
The heuristic (BFS distances of uncommitted agents) only orders the
exhaustive search; it never prunes a state that could lead to a cheaper goal.
"""
from __future__ import annotations

import heapq
import itertools
from functools import lru_cache
from typing import Optional

from .conflict import PAIRWISE_KINDS, cycle_conflicts, pairwise_conflicts
from .model import ConflictKind, Instance, Objective, Plan, SemanticsProfile, Solution, TargetBehavior, Vertex
from .objective import evaluate
from .solvers.common import SolverResult, Status

GONE = None


def brute_force_optimal(
    instance: Instance,
    profile: SemanticsProfile,
    horizon: Optional[int] = None,
) -> SolverResult:
    """Minimum ``profile.objective`` over all conflict-free joint plans.

    Every agent's plan has at most ``horizon`` actions (default ``|V| + k``).
    Returns ``Status.SOLVED`` with the cost and a witness solution, or
    ``Status.UNSOLVABLE`` when nothing valid exists within the horizon, which
    does not prove that the instance is unsolvable.
    """
    grid = instance.grid
    k = instance.k
    if horizon is None:
        horizon = grid.num_vertices + k
    behavior = profile.target_behavior
    disappear = behavior is TargetBehavior.DISAPPEAR
    pair_kinds = profile.forbidden & PAIRWISE_KINDS
    check_cycles = ConflictKind.CYCLE in profile.forbidden
    soc = profile.objective is Objective.SUM_OF_COSTS
    targets = instance.targets
    dists = [grid.bfs_distances(t) for t in targets]
    if any(s not in d or d[s] > horizon for s, d in zip(instance.sources, dists)):
        return SolverResult(Status.UNSOLVABLE, message="some agent cannot reach its target within the horizon")

    def step_plan(agent: int, u, v) -> Optional[Plan]:
        if u is GONE:
            return None
        return Plan(agent, (u,) if v is GONE else (u, v))

    @lru_cache(maxsize=None)
    def pair_ok(u1, v1, u2, v2) -> bool:
        p, q = step_plan(0, u1, v1), step_plan(1, u2, v2)
        if p is None or q is None:
            return True
        return not pairwise_conflicts(p, q, pair_kinds, behavior)

    def step_ok(before: tuple, after: tuple) -> bool:
        for i in range(k):
            for j in range(i + 1, k):
                if not pair_ok(before[i], after[i], before[j], after[j]):
                    return False
        if check_cycles:
            moves = [p for i in range(k) if (p := step_plan(i, before[i], after[i])) is not None]
            if cycle_conflicts(moves, behavior):
                return False
        return True

    def h(pos: tuple, committed: tuple) -> int:
        rest = [dists[i][pos[i]] for i in range(k) if not committed[i]]
        if not rest:
            return 0
        return sum(rest) if soc else max(rest)

    start = (0, tuple(instance.sources), (False,) * k)
    parent: dict = {start: None}
    best = {start: 0}
    tick = itertools.count()
    heap = [(h(start[1], start[2]), 0, next(tick), start)]

    def relax(node, succ, g: int, hval: int) -> None:
        if g < best.get(succ, g + 1):
            best[succ] = g
            parent[succ] = node
            heapq.heappush(heap, (g + hval, g, next(tick), succ))

    while heap:
        _, g, _, node = heapq.heappop(heap)
        if g > best[node]:
            continue
        t, pos, committed = node
        if all(committed):
            return _solved(_witness(node, parent, instance), profile)
        at_target = [i for i in range(k) if not committed[i] and pos[i] == targets[i]]
        for r in range(len(at_target) + 1):
            for newly in itertools.combinations(at_target, r):
                flags = tuple(c or i in newly for i, c in enumerate(committed))
                if all(flags):
                    relax(node, (t, pos, flags), g, 0)
                    continue
                if any(t + dists[i][pos[i]] > horizon for i in range(k) if not flags[i]):
                    continue
                cost = sum(not c for c in flags) if soc else 1
                options = []
                for i in range(k):
                    if flags[i]:
                        options.append((GONE,) if disappear else (pos[i],))
                    else:
                        options.append(tuple(w for w in grid.neighbors(pos[i]) + (pos[i],) if w in dists[i]))
                for after in itertools.product(*options):
                    if step_ok(pos, after):
                        relax(node, (t + 1, after, flags), g + cost, h(after, flags))
    return SolverResult(Status.UNSOLVABLE, message=f"no valid joint plan with at most {horizon} actions per agent")


def _witness(goal, parent, instance: Instance) -> Solution:
    chain = []
    node = goal
    while node is not None:
        chain.append(node)
        node = parent[node]
    chain.reverse()
    plans = []
    for i in range(instance.k):
        # the agent commits on the step out of the node before its flag first shows
        first = next(n for n, (_, _, flags) in enumerate(chain) if flags[i])
        commit_time = chain[first - 1][0]
        locs: list[Vertex] = []
        last_t = -1
        # a final all-commit node repeats its predecessor's time; keep one entry per step
        for t, pos, _ in chain:
            if t <= commit_time and t != last_t:
                locs.append(pos[i])
                last_t = t
        plans.append(Plan(i, tuple(locs), instance.grid).canonical())
    return Solution(tuple(plans))


def _solved(solution: Solution, profile: SemanticsProfile) -> SolverResult:
    return SolverResult(Status.SOLVED, solution, evaluate(solution, profile.objective, profile.target_behavior))


def enumerate_plans(instance: Instance, agent: int, length: int) -> list[Plan]:
    """All canonical plans of exactly ``length`` actions for ``agent``, in a fixed order."""
    grid = instance.grid
    source, target = instance.sources[agent], instance.targets[agent]
    dist = grid.bfs_distances(target)
    out: list[Plan] = []

    def extend(path: list[Vertex]) -> None:
        t = len(path) - 1
        v = path[-1]
        if t == length:
            if v == target and (length == 0 or path[-2] != target):
                out.append(Plan(agent, tuple(path), grid))
            return
        for w in sorted(grid.neighbors(v) + (v,)):
            if dist.get(w, length + 1) <= length - t - 1:
                path.append(w)
                extend(path)
                path.pop()

    if source in dist:
        extend([source])
    return out
