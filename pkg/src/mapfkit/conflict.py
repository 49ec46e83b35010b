"""Detection of vertex, edge, following, cycle and swapping conflicts.

Every check is the literal pairwise formula evaluated at each time step ``x``
in ``[0, H]`` (vertex) or ``[0, H)`` (kinds that look at ``x`` and ``x + 1``),
where ``H`` is the longest plan length. Beyond its own plan an agent sits on
its target under stay-at-target and is absent under disappear-at-target; an
absent agent takes part in no conflict.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import networkx as nx

from .model import (
    ABSENT,
    ConflictKind,
    Plan,
    SemanticsProfile,
    Solution,
    TargetBehavior,
    Vertex,
    location_at,
)

PAIRWISE_KINDS = frozenset(
    {ConflictKind.VERTEX, ConflictKind.EDGE, ConflictKind.FOLLOWING, ConflictKind.SWAPPING}
)


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Conflict:
    """A witnessed violation.

    ``agents`` and ``vertices`` are aligned per kind:

    * vertex: agents ``(i, j)`` with ``i < j``, vertices ``(v,)``
    * edge: agents ``(i, j)`` with ``i < j``, vertices ``(u, v)``, the shared move ``u -> v``
    * following: agents ``(follower, leader)``, vertices ``(v,)`` where the follower
      is at ``v`` at ``time + 1`` and the leader was at ``v`` at ``time``
    * swapping / cycle: agents in rotation order starting from the smallest index,
      vertices are each agent's location at ``time``; agent ``agents[m]`` moves onto
      ``vertices[m + 1]`` (cyclically)
    """

    time: int
    kind: ConflictKind
    agents: Tuple[int, ...]
    vertices: Tuple[Vertex, ...]

    def __post_init__(self):
        if len(set(self.agents)) != len(self.agents):
            raise ValueError(f"conflict agents must be distinct: {self.agents}")
        if self.kind is not ConflictKind.CYCLE and len(self.agents) != 2:
            raise ValueError(f"{self.kind.value} conflicts involve exactly two agents")
        if self.time < 0:
            raise ValueError("conflict time must be nonnegative")


def _check_grids(p1: Plan, p2: Plan) -> None:
    if p1.grid is not None and p2.grid is not None and p1.grid is not p2.grid and p1.grid != p2.grid:
        raise GridMismatchError(f"plans of agents {p1.agent} and {p2.agent} are on different grids")


def _trajectory(plan: Plan, horizon: int, behavior: TargetBehavior) -> list:
    return [location_at(plan, x, behavior) for x in range(horizon + 2)]


def pairwise_conflicts(
    p1: Plan,
    p2: Plan,
    kinds: Iterable[ConflictKind | str] = PAIRWISE_KINDS,
    behavior: TargetBehavior | str = TargetBehavior.STAY,
) -> list[Conflict]:
    """All witnesses of the requested pairwise kinds between two plans.

    Cycle conflicts are not pairwise; a two-agent rotation is a swapping conflict.
    """
    kinds = {ConflictKind(k) for k in kinds}
    if ConflictKind.CYCLE in kinds:
        raise ValueError("cycle conflicts span agent sets; use cycle_conflicts")
    _check_grids(p1, p2)
    behavior = TargetBehavior(behavior)
    if p1.agent > p2.agent:
        p1, p2 = p2, p1
    i, j = p1.agent, p2.agent
    horizon = max(len(p1), len(p2))
    a = _trajectory(p1, horizon, behavior)
    b = _trajectory(p2, horizon, behavior)

    found: list[Conflict] = []
    for x in range(horizon + 1):
        a0, b0 = a[x], b[x]
        if ConflictKind.VERTEX in kinds and a0 is not ABSENT and a0 == b0:
            found.append(Conflict(x, ConflictKind.VERTEX, (i, j), (a0,)))
        if x == horizon:
            break
        a1, b1 = a[x + 1], b[x + 1]
        if ConflictKind.EDGE in kinds and a0 is not ABSENT and a1 is not ABSENT and a0 == b0 and a1 == b1:
            found.append(Conflict(x, ConflictKind.EDGE, (i, j), (a0, a1)))
        if ConflictKind.FOLLOWING in kinds:
            if a1 is not ABSENT and a1 == b0:
                found.append(Conflict(x, ConflictKind.FOLLOWING, (i, j), (a1,)))
            if b1 is not ABSENT and b1 == a0:
                found.append(Conflict(x, ConflictKind.FOLLOWING, (j, i), (b1,)))
        if (
            ConflictKind.SWAPPING in kinds
            and a1 is not ABSENT
            and b1 is not ABSENT
            and a1 == b0
            and b1 == a0
        ):
            found.append(Conflict(x, ConflictKind.SWAPPING, (i, j), (a0, b0)))
    return found


def _rotate_to_min(cycle: Sequence[int]) -> Tuple[int, ...]:
    m = cycle.index(min(cycle))
    return tuple(cycle[m:]) + tuple(cycle[:m])


def cycle_conflicts(
    solution: Solution | Sequence[Plan],
    behavior: TargetBehavior | str = TargetBehavior.STAY,
) -> list[Conflict]:
    """Every rotating cycle, at every time step, among the plans of a solution.

    At each ``x`` agent ``a`` points at agent ``b`` when ``a`` is at time ``x + 1``
    where ``b`` was at time ``x``; each simple cycle of that digraph is reported
    once as a cycle conflict, and two-agent cycles also as swapping conflicts.
    An arrow between two agents exists only for ``x`` below the longer of their
    two plans, as in :func:`pairwise_conflicts`.
    """
    behavior = TargetBehavior(behavior)
    plans = list(solution)
    if len(plans) < 2:
        return []
    horizon = max(len(p) for p in plans)
    traj = {p.agent: _trajectory(p, horizon, behavior) for p in plans}
    lengths = {p.agent: len(p) for p in plans}
    found: list[Conflict] = []
    for x in range(horizon):
        at_x: dict[Vertex, list[int]] = {}
        for agent, locs in traj.items():
            if locs[x] is not ABSENT:
                at_x.setdefault(locs[x], []).append(agent)
        graph = nx.DiGraph()
        for agent, locs in traj.items():
            nxt = locs[x + 1]
            if nxt is ABSENT:
                continue
            for other in at_x.get(nxt, ()):
                # same horizon as the pairwise following check
                if other != agent and x < max(lengths[agent], lengths[other]):
                    graph.add_edge(agent, other)
        if graph.number_of_edges() == 0:
            continue
        for raw in nx.simple_cycles(graph):
            order = _rotate_to_min(raw)
            verts = tuple(traj[a][x] for a in order)
            found.append(Conflict(x, ConflictKind.CYCLE, order, verts))
            if len(order) == 2:
                found.append(Conflict(x, ConflictKind.SWAPPING, order, verts))
    found.sort()
    return found


def solution_conflicts(solution: Solution | Sequence[Plan], profile: SemanticsProfile) -> list[Conflict]:
    """Every conflict forbidden by ``profile``; empty iff the plans are mutually valid."""
    plans = list(solution)
    kinds = profile.forbidden & PAIRWISE_KINDS
    found: set[Conflict] = set()
    if kinds:
        for a in range(len(plans)):
            for b in range(a + 1, len(plans)):
                found.update(pairwise_conflicts(plans[a], plans[b], kinds, profile.target_behavior))
    if ConflictKind.CYCLE in profile.forbidden:
        found.update(
            c
            for c in cycle_conflicts(plans, profile.target_behavior)
            if c.kind in profile.forbidden
        )
    return sorted(found)

