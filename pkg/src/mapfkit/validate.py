from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

from .conflict import Conflict, solution_conflicts
from .model import Instance, SemanticsProfile, Solution
from .objective import makespan, sum_of_costs


class ShapeError(ValueError):
    """The solution does not hold exactly one plan per agent."""


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    structural_errors: Tuple[Tuple[int, int, str], ...]
    conflicts: Tuple[Conflict, ...]
    makespan: int
    sum_of_costs: int
    warnings: Tuple[Tuple[int, int, str], ...] = field(default=())

    def format(self) -> str:
        lines = [
            f"valid: {'yes' if self.valid else 'no'}",
            f"makespan: {self.makespan}",
            f"sum_of_costs: {self.sum_of_costs}",
        ]
        for agent, t, msg in self.structural_errors:
            lines.append(f"error: agent {agent} t={t}: {msg}")
        for agent, t, msg in self.warnings:
            lines.append(f"warning: agent {agent} t={t}: {msg}")
        for c in self.conflicts:
            agents = ",".join(map(str, c.agents))
            verts = " ".join(f"{x},{y}" for x, y in c.vertices)
            lines.append(f"conflict: {c.kind.value} t={c.time} agents={agents} at {verts}")
        return "\n".join(lines)


def validate(instance: Instance, solution: Solution, profile: SemanticsProfile) -> ValidationReport:
    """Check a solution against an instance, then against the profile's conflicts.

    Objectives are computed on the canonical plans whether or not the solution
    is valid. Trailing waits at the target are accepted with a warning.
    """
    if len(solution) != instance.k:
        raise ShapeError(f"instance has {instance.k} agents but solution has {len(solution)} plans")
    grid = instance.grid
    errors: list[Tuple[int, int, str]] = []
    warnings: list[Tuple[int, int, str]] = []
    for plan in solution:
        i = plan.agent
        locs = plan.locations
        if locs[0] != instance.sources[i]:
            errors.append((i, 0, f"starts at {locs[0]}, source is {instance.sources[i]}"))
        if locs[-1] != instance.targets[i]:
            errors.append((i, len(locs) - 1, f"ends at {locs[-1]}, target is {instance.targets[i]}"))
        for t, v in enumerate(locs):
            if not grid.is_passable(v):
                errors.append((i, t, f"cell {v} is blocked or outside the grid"))
        for t, (u, v) in enumerate(plan.steps()):
            if u != v and grid.is_passable(u) and grid.is_passable(v) and not grid.adjacent(u, v):
                errors.append((i, t, f"illegal move {u} -> {v}"))
        if not plan.is_canonical():
            extra = len(plan) - len(plan.canonical())
            warnings.append((i, len(plan), f"{extra} trailing wait(s) at target stripped"))

    canonical = solution.canonical()
    conflicts = tuple(solution_conflicts(canonical, profile))
    return ValidationReport(
        valid=not errors and not conflicts,
        structural_errors=tuple(errors),
        conflicts=conflicts,
        makespan=makespan(canonical),
        sum_of_costs=sum_of_costs(canonical, profile.target_behavior),
        warnings=tuple(warnings),
    )
