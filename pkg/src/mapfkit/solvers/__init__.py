"""Solvers for classical MAPF on 4-neighbor grids (stay at target, unit costs)."""
from .cbs import cbs
from .common import UNLIMITED, SolverBudget, SolverResult, Status
from .prioritized import prioritized
from .space_time_astar import Constraint, ConstraintTable, space_time_astar

__all__ = [
    "Constraint",
    "ConstraintTable",
    "SolverBudget",
    "SolverResult",
    "Status",
    "UNLIMITED",
    "cbs",
    "prioritized",
    "space_time_astar",
]
