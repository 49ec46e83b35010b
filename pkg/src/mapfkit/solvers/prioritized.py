from __future__ import annotations

import time
from typing import Optional, Sequence

from ..model import SEARCH_BASED, ConflictKind, Instance, Plan, SemanticsProfile, Solution, TargetBehavior
from ..objective import sum_of_costs
from .common import UNLIMITED, SolverBudget, SolverResult, Status
from .space_time_astar import Constraint, ConstraintTable, space_time_astar


def _reservations(plan: Plan, profile: SemanticsProfile) -> tuple[list[Constraint], int]:
    """Constraints a later agent must respect to stay clear of ``plan``.

    Returns the constraints plus the time from which ``plan``'s target is
    occupied for good.
    """
    locs = plan.locations
    n = len(plan)
    out: list[Constraint] = []
    following = ConflictKind.FOLLOWING in profile.forbidden
    for t, v in enumerate(locs):
        out.append(Constraint.at(-1, v, t))
        if following:
            # neither may step where the other just was
            out.append(Constraint.at(-1, v, t + 1))
            if t > 0:
                out.append(Constraint.at(-1, v, t - 1))
    if ConflictKind.SWAPPING in profile.forbidden:
        for t in range(n):
            u, v = locs[t], locs[t + 1]
            if u != v:
                out.append(Constraint.move(-1, v, u, t))
    return out, n


def prioritized(
    instance: Instance,
    order: Optional[Sequence[int]] = None,
    profile: SemanticsProfile = SEARCH_BASED,
    budget: SolverBudget = UNLIMITED,
) -> SolverResult:
    """Plan agents one at a time in ``order``; each avoids all earlier plans.

    Earlier agents park on their targets, so a later agent may never enter
    them after they arrive, and must itself arrive only after every earlier
    agent has last passed through its target. Incomplete: a bad order can fail
    on solvable instances.
    """
    if profile.target_behavior is not TargetBehavior.STAY:
        raise ValueError("prioritized planning supports stay-at-target only")
    if ConflictKind.VERTEX not in profile.forbidden:
        raise ValueError("prioritized planning requires vertex conflicts to be forbidden")
    started = time.monotonic()
    order = list(range(instance.k)) if order is None else list(order)
    if sorted(order) != list(range(instance.k)):
        raise ValueError(f"order must be a permutation of 0..{instance.k - 1}")

    grid = instance.grid
    reserved: list[Constraint] = []
    parked: dict = {}
    plans: dict[int, Plan] = {}
    stats: dict = {}
    for agent in order:
        if budget.expired():
            return SolverResult(Status.TIMEOUT, low_level_expanded=stats.get("expanded", 0),
                                runtime=time.monotonic() - started)
        table = ConstraintTable(reserved, parked)
        res = space_time_astar(
            grid, instance.sources[agent], instance.targets[agent], table,
            budget=budget, agent=agent, stats=stats,
        )
        if res is Status.TIMEOUT:
            return SolverResult(Status.TIMEOUT, low_level_expanded=stats.get("expanded", 0),
                                runtime=time.monotonic() - started)
        if res is Status.NO_PATH:
            return SolverResult(
                Status.FAILURE,
                low_level_expanded=stats.get("expanded", 0),
                runtime=time.monotonic() - started,
                message=f"agent {agent} has no path around higher-priority agents",
            )
        plans[agent] = res
        cons, park_time = _reservations(res, profile)
        reserved.extend(cons)
        parked[res.target] = park_time
        if ConflictKind.FOLLOWING in profile.forbidden:
            parked[res.target] = max(park_time - 1, 0)

    solution = Solution(tuple(plans[i] for i in range(instance.k)))
    return SolverResult(
        Status.SOLVED,
        solution,
        sum_of_costs(solution),
        low_level_expanded=stats.get("expanded", 0),
        runtime=time.monotonic() - started,
    )
