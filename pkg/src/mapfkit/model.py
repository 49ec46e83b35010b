"""Core data types for classical multi-agent pathfinding on 4-neighbor grids.

Vertices are ``(x, y)`` tuples with ``x`` the column and ``y`` the row, both
0-based. Plans store locations rather than actions: ``plan.locations[i]`` is
where the agent is after ``i`` actions.
"""
from __future__ import annotations

import enum
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

Vertex = Tuple[int, int]

CARDINAL_MOVES: Tuple[Vertex, ...] = ((1, 0), (0, 1), (-1, 0), (0, -1))


class GridError(ValueError):
    """Raised for out-of-bounds cells or malformed grid arguments."""


class InstanceError(ValueError):
    """Raised when an instance violates the problem-tuple invariants."""


class ConflictKind(str, enum.Enum):
    VERTEX = "vertex"
    EDGE = "edge"
    FOLLOWING = "following"
    CYCLE = "cycle"
    SWAPPING = "swapping"


class TargetBehavior(str, enum.Enum):
    STAY = "stay"
    DISAPPEAR = "disappear"


class Objective(str, enum.Enum):
    MAKESPAN = "makespan"
    SUM_OF_COSTS = "sum_of_costs"


# Forbidding the key forbids every kind in the value.
DOMINANCE = {
    ConflictKind.VERTEX: frozenset({ConflictKind.EDGE}),
    ConflictKind.FOLLOWING: frozenset({ConflictKind.CYCLE, ConflictKind.SWAPPING}),
    ConflictKind.CYCLE: frozenset({ConflictKind.SWAPPING}),
}


class Grid:
    """Undirected unit-cost 4-neighbor grid.

    ``passable`` is a boolean array of shape ``(height, width)`` so that it
    reads like the map file; use :meth:`is_passable` with ``(x, y)`` vertices.
    """

    __slots__ = ("width", "height", "passable", "_neighbors")

    def __init__(self, passable: np.ndarray):
        arr = np.array(passable, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise GridError(f"passable mask must be a non-empty 2-D array, got shape {arr.shape}")
        arr.setflags(write=False)
        self.passable = arr
        self.height, self.width = arr.shape
        self._neighbors: dict[Vertex, Tuple[Vertex, ...]] = {}
        for y, x in zip(*np.nonzero(arr)):
            v = (int(x), int(y))
            self._neighbors[v] = tuple(
                (v[0] + dx, v[1] + dy)
                for dx, dy in CARDINAL_MOVES
                if self._open(v[0] + dx, v[1] + dy)
            )

    def _open(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height and bool(self.passable[y, x])

    def in_bounds(self, v: Vertex) -> bool:
        return 0 <= v[0] < self.width and 0 <= v[1] < self.height

    def is_passable(self, v: Vertex) -> bool:
        return v in self._neighbors

    def neighbors(self, v: Vertex) -> Tuple[Vertex, ...]:
        """Passable 4-neighbors of ``v`` (empty for blocked or off-grid cells)."""
        return self._neighbors.get(v, ())

    def adjacent(self, u: Vertex, v: Vertex) -> bool:
        return v in self._neighbors.get(u, ())

    def vertices(self) -> Iterator[Vertex]:
        """Passable vertices in row-major order."""
        return iter(self._neighbors)

    @property
    def num_vertices(self) -> int:
        return len(self._neighbors)

    def bfs_distances(self, source: Vertex) -> dict[Vertex, int]:
        """Unit-cost shortest-path distance from ``source`` to every reachable vertex."""
        if source not in self._neighbors:
            return {}
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self._neighbors[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.passable.shape == other.passable.shape and bool(
            np.array_equal(self.passable, other.passable)
        )

    def __hash__(self) -> int:
        return hash((self.passable.shape, self.passable.tobytes()))

    def __repr__(self) -> str:
        return f"Grid(width={self.width}, height={self.height}, passable={self.num_vertices})"


def make_grid(width: int, height: int, blocked: Iterable[Vertex] = ()) -> Grid:
    """Build a grid where every cell except ``blocked`` is passable."""
    if width < 1 or height < 1:
        raise GridError(f"grid dimensions must be positive, got {width}x{height}")
    mask = np.ones((height, width), dtype=bool)
    for x, y in blocked:
        if not (0 <= x < width and 0 <= y < height):
            raise GridError(f"blocked cell {(x, y)} outside {width}x{height} grid")
        mask[y, x] = False
    return Grid(mask)


@dataclass(frozen=True)
class Instance:
    """The classical problem tuple: a grid plus per-agent sources and targets."""

    grid: Grid
    sources: Tuple[Vertex, ...]
    targets: Tuple[Vertex, ...]

    def __post_init__(self):
        sources = tuple(tuple(map(int, s)) for s in self.sources)
        targets = tuple(tuple(map(int, t)) for t in self.targets)
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "targets", targets)
        if len(sources) != len(targets):
            raise InstanceError(f"{len(sources)} sources but {len(targets)} targets")
        if not sources:
            raise InstanceError("an instance needs at least one agent")
        for i, (s, t) in enumerate(zip(sources, targets)):
            for label, v in (("source", s), ("target", t)):
                if not self.grid.is_passable(v):
                    raise InstanceError(f"agent {i} {label} {v} is not a passable cell")
        if len(set(sources)) != len(sources):
            raise InstanceError("sources must be pairwise distinct")
        if len(set(targets)) != len(targets):
            raise InstanceError("targets must be pairwise distinct")
        for i, (s, t) in enumerate(zip(sources, targets)):
            if t not in self.grid.bfs_distances(s):
                raise InstanceError(f"agent {i} target {t} unreachable from source {s}")

    @property
    def k(self) -> int:
        return len(self.sources)

    def prefix(self, n: int) -> "Instance":
        """The sub-instance made of the first ``n`` agents."""
        return Instance(self.grid, self.sources[:n], self.targets[:n])


@dataclass(frozen=True)
class Plan:
    """Location sequence of one agent; ``len(plan)`` is the number of actions.

    ``grid`` is optional. When two plans both carry a grid, conflict detection
    checks that it is the same one.
    """

    agent: int
    locations: Tuple[Vertex, ...]
    grid: Optional[Grid] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        locs = tuple(tuple(v) if isinstance(v, (list, np.ndarray)) else v for v in self.locations)
        if not locs:
            raise ValueError("a plan holds at least its start location")
        object.__setattr__(self, "locations", locs)

    def __len__(self) -> int:
        return len(self.locations) - 1

    @property
    def source(self) -> Vertex:
        return self.locations[0]

    @property
    def target(self) -> Vertex:
        return self.locations[-1]

    def is_canonical(self) -> bool:
        return len(self.locations) == 1 or self.locations[-1] != self.locations[-2]

    def canonical(self) -> "Plan":
        """Drop the trailing run of waits at the final location."""
        locs = self.locations
        end = len(locs)
        while end > 1 and locs[end - 2] == locs[-1]:
            end -= 1
        if end == len(locs):
            return self
        return Plan(self.agent, locs[:end], self.grid)

    def steps(self) -> Iterator[Tuple[Vertex, Vertex]]:
        return zip(self.locations, self.locations[1:])


@dataclass(frozen=True)
class Solution:
    """One plan per agent, indexed by agent."""

    plans: Tuple[Plan, ...]

    def __post_init__(self):
        plans = tuple(self.plans)
        object.__setattr__(self, "plans", plans)
        for i, p in enumerate(plans):
            if p.agent != i:
                raise ValueError(f"plan at index {i} belongs to agent {p.agent}")

    @classmethod
    def from_paths(cls, paths: Sequence[Sequence[Vertex]], grid: Optional[Grid] = None) -> "Solution":
        return cls(tuple(Plan(i, tuple(map(tuple, p)), grid) for i, p in enumerate(paths)))

    def __len__(self) -> int:
        return len(self.plans)

    def __iter__(self) -> Iterator[Plan]:
        return iter(self.plans)

    def __getitem__(self, i: int) -> Plan:
        return self.plans[i]

    def canonical(self) -> "Solution":
        return Solution(tuple(p.canonical() for p in self.plans))


def normalize_forbidden(kinds: Iterable[ConflictKind | str]) -> frozenset[ConflictKind]:
    """Close a forbidden set under the dominance relations between conflict kinds."""
    closed = {ConflictKind(k) for k in kinds}
    changed = True
    while changed:
        changed = False
        for kind in list(closed):
            extra = DOMINANCE.get(kind, frozenset()) - closed
            if extra:
                closed |= extra
                changed = True
    return frozenset(closed)


@dataclass(frozen=True)
class SemanticsProfile:
    """Which conflicts are forbidden, what agents do at their targets, and what is optimized."""

    forbidden: frozenset[ConflictKind] = frozenset(
        {ConflictKind.VERTEX, ConflictKind.EDGE, ConflictKind.SWAPPING}
    )
    target_behavior: TargetBehavior = TargetBehavior.STAY
    objective: Objective = Objective.SUM_OF_COSTS

    def __post_init__(self):
        object.__setattr__(self, "forbidden", normalize_forbidden(self.forbidden))
        object.__setattr__(self, "target_behavior", TargetBehavior(self.target_behavior))
        object.__setattr__(self, "objective", Objective(self.objective))

    @classmethod
    def parse(cls, text: str, target_behavior: str = "stay", objective: str = "sum_of_costs") -> "SemanticsProfile":
        """Build a profile from a comma-joined list such as ``"vertex,edge,swapping"``."""
        kinds = [part.strip() for part in text.split(",") if part.strip()]
        try:
            forbidden = [ConflictKind(k) for k in kinds]
        except ValueError as exc:
            raise ValueError(f"unknown conflict kind in profile {text!r}") from exc
        return cls(frozenset(forbidden), TargetBehavior(target_behavior), Objective(objective))

    def describe(self) -> str:
        order = [k for k in ConflictKind if k in self.forbidden]
        return ",".join(k.value for k in order)


# Search-based solvers: swaps forbidden, following allowed, stay at target, sum of costs.
SEARCH_BASED = SemanticsProfile()
# Pebble motion / most compilation-based work: following forbidden as well.
PEBBLE_MOTION = SemanticsProfile(frozenset(ConflictKind))


@dataclass(frozen=True)
class MoveTable:
    k_exponent: int
    moves: Tuple[Tuple[int, int, float], ...]

    def offsets(self) -> list[Vertex]:
        return [(dx, dy) for dx, dy, _ in self.moves]


def neighborhood_moves(k_exponent: int) -> MoveTable:
    """Move set of a ``2**k`` neighbor grid with Euclidean move costs.

    ``k=2`` gives the cardinal moves. For ``k >= 3`` the moves are all primitive
    offsets (coprime components) whose larger component is at most
    ``k - 2``; this yields 8, 16 and 32 moves for k = 3, 4, 5.
    """
    if not 2 <= k_exponent <= 5:
        raise ValueError(f"k_exponent must be in [2, 5], got {k_exponent}")
    if k_exponent == 2:
        offsets = list(CARDINAL_MOVES)
    else:
        reach = k_exponent - 2
        offsets = [
            (dx, dy)
            for dx, dy in itertools.product(range(-reach, reach + 1), repeat=2)
            if (dx, dy) != (0, 0) and math.gcd(dx, dy) == 1
        ]
    offsets.sort(key=lambda d: (math.atan2(d[1], d[0]) % (2 * math.pi), d))
    moves = tuple((dx, dy, math.hypot(dx, dy)) for dx, dy in offsets)
    assert len(moves) == 2**k_exponent
    return MoveTable(k_exponent, moves)


ABSENT = None


def location_at(plan: Plan, x: int, behavior: TargetBehavior | str = TargetBehavior.STAY) -> Optional[Vertex]:
    """Where the agent is at time ``x``; ``ABSENT`` once it has disappeared."""
    if x < len(plan.locations):
        return plan.locations[x]
    if TargetBehavior(behavior) is TargetBehavior.STAY:
        return plan.locations[-1]
    return ABSENT
