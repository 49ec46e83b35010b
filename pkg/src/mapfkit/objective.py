"""Makespan and sum-of-costs."""
from __future__ import annotations

from typing import Sequence

from .model import Objective, Plan, Solution, TargetBehavior


def plan_cost(plan: Plan) -> int:
    """Time of the agent's final arrival at its target.

    Waiting at the target is charged whenever the agent leaves again later;
    only the waits after the last arrival are free.
    """
    locs = plan.locations
    target = locs[-1]
    x = len(locs) - 1
    while x > 0 and locs[x - 1] == target:
        x -= 1
    return x


def makespan(solution: Solution | Sequence[Plan]) -> int:
    return max((len(p) for p in solution), default=0)


def sum_of_costs(
    solution: Solution | Sequence[Plan],
    behavior: TargetBehavior | str = TargetBehavior.STAY,
) -> int:
    # Trailing target waits are free under both behaviors, so ``behavior`` never
    # changes the value; it is accepted to keep the objective signature uniform.
    TargetBehavior(behavior)
    return sum(plan_cost(p) for p in solution)


def evaluate(
    solution: Solution | Sequence[Plan],
    objective: Objective | str,
    behavior: TargetBehavior | str = TargetBehavior.STAY,
) -> int:
    if Objective(objective) is Objective.MAKESPAN:
        return makespan(solution)
    return sum_of_costs(solution, behavior)
