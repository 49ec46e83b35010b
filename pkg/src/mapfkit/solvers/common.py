from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Optional

from ..model import Solution


class Status(str, enum.Enum):
    SOLVED = "solved"
    TIMEOUT = "timeout"
    NO_PATH = "no_path"
    FAILURE = "failure"
    UNSOLVABLE = "unsolvable"


@dataclass(frozen=True)
class SolverBudget:
    """Wall-clock deadline (``time.monotonic`` seconds) and optional node cap."""

    wall_deadline: float = float("inf")
    node_limit: Optional[int] = None

    @classmethod
    def seconds(cls, limit: float, node_limit: Optional[int] = None) -> "SolverBudget":
        return cls(time.monotonic() + limit, node_limit)

    def expired(self, nodes: int = 0) -> bool:
        if self.node_limit is not None and nodes >= self.node_limit:
            return True
        return time.monotonic() >= self.wall_deadline


UNLIMITED = SolverBudget()


@dataclass
class SolverResult:
    """Outcome of a solver call, in the spirit of ``scipy.optimize.OptimizeResult``."""

    status: Status
    solution: Optional[Solution] = None
    cost: Optional[int] = None
    high_level_expanded: int = 0
    low_level_expanded: int = 0
    runtime: float = 0.0
    message: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED
