"""Single-agent A* over (vertex, time) states under vertex/edge constraints."""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Tuple, Union

from ..model import Grid, Plan, Vertex
from .common import UNLIMITED, SolverBudget, Status


@dataclass(frozen=True, order=True)
class Constraint:
    """Forbid ``agent`` from being at ``vertex`` at ``time``, or, when ``to`` is
    set, from moving ``vertex -> to`` between ``time`` and ``time + 1``.
    ``vertex == to`` forbids that wait. With ``onward`` a vertex constraint
    holds at every time from ``time`` on. With ``finish`` the agent may not
    make its final arrival at ``vertex`` at or before ``time``."""

    agent: int
    time: int
    vertex: Vertex
    to: Optional[Vertex] = None
    onward: bool = False
    finish: bool = False

    def __post_init__(self):
        if self.time < 0:
            raise ValueError("constraint time must be nonnegative")
        if (self.onward or self.finish) and self.to is not None:
            raise ValueError("onward and finish constraints take no move")
        if self.onward and self.finish:
            raise ValueError("a constraint is either onward or finish")

    @classmethod
    def at(cls, agent: int, vertex: Vertex, time: int) -> "Constraint":
        return cls(agent, time, vertex)

    @classmethod
    def move(cls, agent: int, u: Vertex, v: Vertex, time: int) -> "Constraint":
        return cls(agent, time, u, v)

    @classmethod
    def from_time(cls, agent: int, vertex: Vertex, time: int) -> "Constraint":
        return cls(agent, time, vertex, onward=True)

    @classmethod
    def arrive_after(cls, agent: int, target: Vertex, time: int) -> "Constraint":
        return cls(agent, time, target, finish=True)

    @property
    def is_edge(self) -> bool:
        return self.to is not None


class ConstraintTable:
    """Constraint lookup for one agent.

    ``blocked_from`` maps a vertex to the first time from which it is forbidden
    for good (used for agents already parked at their targets).
    """

    __slots__ = ("vertex", "edge", "blocked_from", "finish", "settle")

    def __init__(
        self,
        constraints: Iterable[Constraint] = (),
        blocked_from: Optional[Mapping[Vertex, int]] = None,
    ):
        self.vertex: set[Tuple[Vertex, int]] = set()
        self.edge: set[Tuple[Vertex, Vertex, int]] = set()
        self.blocked_from: dict[Vertex, int] = dict(blocked_from or {})
        self.finish: dict[Vertex, int] = {}
        settle = max(self.blocked_from.values(), default=0)
        for c in constraints:
            if c.finish:
                self.finish[c.vertex] = max(c.time, self.finish.get(c.vertex, c.time))
                settle = max(settle, c.time + 1)
            elif c.onward:
                self.blocked_from[c.vertex] = min(c.time, self.blocked_from.get(c.vertex, c.time))
                settle = max(settle, c.time)
            elif c.to is None:
                self.vertex.add((c.vertex, c.time))
                settle = max(settle, c.time)
            else:
                self.edge.add((c.vertex, c.to, c.time))
                settle = max(settle, c.time + 1)
        # From ``settle`` on, the constraint landscape no longer changes with time.
        self.settle = settle

    def last_vertex_block(self, v: Vertex) -> int:
        """Latest time ``v`` cannot be a final stop, ``-1`` if never, ``inf`` if for good."""
        if v in self.blocked_from:
            return float("inf")
        last = max((t for u, t in self.vertex if u == v), default=-1)
        return max(last, self.finish.get(v, -1))


def space_time_astar(
    grid: Grid,
    source: Vertex,
    target: Vertex,
    constraints: Union[ConstraintTable, Iterable[Constraint]] = (),
    horizon: Optional[int] = None,
    budget: SolverBudget = UNLIMITED,
    *,
    agent: int = 0,
    distances: Optional[Mapping[Vertex, int]] = None,
    avoid: Optional[Mapping[Tuple[Vertex, int], int]] = None,
    stats: Optional[dict] = None,
) -> Union[Plan, Status]:
    """Minimum-arrival-time plan from ``source`` to ``target``.

    The goal is reached at time ``t`` on the target only if no constraint
    forbids the target at any later time, so the returned plan can park there.
    The heuristic is the BFS distance to ``target`` (pass ``distances`` to reuse
    a precomputed table). Ties on ``f`` prefer deeper states. ``avoid`` maps
    ``(vertex, time)`` to a penalty count used as a tie-break ahead of depth;
    it never changes the plan's cost.

    Returns a canonical :class:`Plan`, ``Status.NO_PATH`` or ``Status.TIMEOUT``.
    """
    table = constraints if isinstance(constraints, ConstraintTable) else ConstraintTable(constraints)
    if distances is None:
        distances = grid.bfs_distances(target)
    if source not in distances:
        return Status.NO_PATH
    if horizon is None:
        horizon = grid.num_vertices + table.settle + 1
    goal_after = table.last_vertex_block(target)
    if goal_after == float("inf"):
        return Status.NO_PATH
    if (source, 0) in table.vertex:
        return Status.NO_PATH

    vcons, econs, blocked, settle = table.vertex, table.edge, table.blocked_from, table.settle
    neighbors = grid.neighbors
    deadline = budget.wall_deadline
    node_cap = budget.node_limit

    def h(v: Vertex, t: int) -> int:
        d = distances[v]
        wait = goal_after + 1 - t
        return d if d >= wait else wait

    # Heap entries: (f, penalty, -t, tick, node) with node = (v, t, parent_node).
    start = (source, 0, None)
    heap = [(h(source, 0), 0, 0, 0, start, 0)]
    best_g: dict[Tuple[Vertex, int], int] = {(source, 0): 0}
    closed: set[Tuple[Vertex, int]] = set()
    tick = 1
    expanded = 0
    result: Union[Plan, Status] = Status.NO_PATH

    while heap:
        f, _, _, _, node, pen = heapq.heappop(heap)
        v, t, _ = node
        key = (v, t if t < settle else settle)
        if key in closed:
            continue
        closed.add(key)
        if v == target and t > goal_after:
            locs = []
            while node is not None:
                locs.append(node[0])
                node = node[2]
            result = Plan(agent, tuple(reversed(locs)), grid)
            break
        expanded += 1
        if time.monotonic() >= deadline:
            result = Status.TIMEOUT
            break
        if node_cap is not None and expanded >= node_cap:
            result = Status.TIMEOUT
            break
        nt = t + 1
        if nt > horizon:
            continue
        nkey_t = nt if nt < settle else settle
        for w in neighbors(v) + (v,):
            if w in blocked and nt >= blocked[w]:
                continue
            if (w, nt) in vcons or (v, w, t) in econs:
                continue
            nkey = (w, nkey_t)
            if nkey in closed:
                continue
            g_old = best_g.get(nkey)
            if g_old is not None and g_old <= nt:
                continue
            best_g[nkey] = nt
            npen = pen + avoid.get((w, nt), 0) if avoid else 0
            heapq.heappush(heap, (nt + h(w, nt), npen, -nt, tick, (w, nt, node), npen))
            tick += 1

    if stats is not None:
        stats["expanded"] = stats.get("expanded", 0) + expanded
    return result
