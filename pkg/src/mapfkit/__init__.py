"""Executable definitions for classical multi-agent pathfinding on grids."""
from .conflict import Conflict, cycle_conflicts, pairwise_conflicts, solution_conflicts
from .model import (
    PEBBLE_MOTION,
    SEARCH_BASED,
    ConflictKind,
    Grid,
    Instance,
    Objective,
    Plan,
    SemanticsProfile,
    Solution,
    TargetBehavior,
    make_grid,
    neighborhood_moves,
)
from .objective import evaluate, makespan, plan_cost, sum_of_costs
from .oracle import brute_force_optimal
from .solvers import SolverBudget, SolverResult, Status, cbs, prioritized, space_time_astar
from .validate import ValidationReport, validate

__version__ = "0.1.0"

__all__ = [
    "Conflict",
    "ConflictKind",
    "Grid",
    "Instance",
    "Objective",
    "PEBBLE_MOTION",
    "Plan",
    "SEARCH_BASED",
    "SemanticsProfile",
    "Solution",
    "SolverBudget",
    "SolverResult",
    "Status",
    "TargetBehavior",
    "ValidationReport",
    "brute_force_optimal",
    "cbs",
    "cycle_conflicts",
    "evaluate",
    "make_grid",
    "makespan",
    "neighborhood_moves",
    "pairwise_conflicts",
    "plan_cost",
    "prioritized",
    "solution_conflicts",
    "space_time_astar",
    "sum_of_costs",
    "validate",
]
