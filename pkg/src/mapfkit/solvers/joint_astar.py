"""Coupled A* for a small group of agents, used for merged agents in CBS.

Search states are ``(time, positions, committed)``. An agent commits once it
stands on its target for good; until then it is charged one unit per step, so
a plan's cost is its final arrival time. Members never collide with each
other (vertex and swapping conflicts), and each member obeys its own
:class:`ConstraintTable`.

Steps use operator decomposition: within one time step the uncommitted
agents move one at a time, so each search node has at most five children.
"""
from __future__ import annotations

import heapq
import itertools
import time
from typing import Mapping, Optional, Sequence, Union

from ..model import Grid, Vertex
from .common import UNLIMITED, SolverBudget, Status
from .space_time_astar import ConstraintTable

INF = float("inf")


def _trim(locs: list, target: Vertex) -> tuple:
    while len(locs) > 1 and locs[-1] == target and locs[-2] == target:
        locs.pop()
    return tuple(locs)


def joint_astar(
    grid: Grid,
    sources: Sequence[Vertex],
    targets: Sequence[Vertex],
    tables: Sequence[ConstraintTable],
    horizon: int,
    budget: SolverBudget = UNLIMITED,
    *,
    distances: Optional[Sequence[Mapping[Vertex, int]]] = None,
    stats: Optional[dict] = None,
) -> Union[list, Status]:
    """Minimum sum-of-costs location sequences for the group, or a ``Status``."""
    m = len(sources)
    if distances is None:
        distances = [grid.bfs_distances(t) for t in targets]
    goal_after = [tab.last_vertex_block(t) for tab, t in zip(tables, targets)]
    if any(g == INF for g in goal_after):
        return Status.NO_PATH
    if any(s not in d for s, d in zip(sources, distances)):
        return Status.NO_PATH
    if any((s, 0) in tab.vertex for s, tab in zip(sources, tables)):
        return Status.NO_PATH
    settle = max(tab.settle for tab in tables)
    everyone = (1 << m) - 1
    deadline = budget.wall_deadline
    neighbors = grid.neighbors

    def h(pos, mask, t, nxt):
        # agents before ``nxt`` have already moved to time t + 1
        total = 0
        for i in range(m):
            if mask >> i & 1:
                continue
            d = distances[i][pos[i]]
            if nxt and i < nxt:
                w = goal_after[i] - t
            else:
                w = goal_after[i] + 1 - t
                if nxt and d < 1:
                    d = 1
            total += d if d >= w else w
        return total

    # node: (pos, prev, mask, t, nxt, parent); nxt == 0 marks a full state at
    # time t, otherwise agents below nxt already stand at their t + 1 cells
    # and prev holds everyone's cells at time t.
    start = (tuple(sources), None, 0, 0, 0, None)
    tick = itertools.count()
    heap = [(h(start[0], 0, 0, 0), 0, 0, next(tick), start)]  # ties favour larger g
    best: dict = {}
    expanded = 0
    result: Union[list, Status] = Status.NO_PATH
    while heap:
        _, neg_g, _, _, node = heapq.heappop(heap)
        g = -neg_g
        pos, prev, mask, t, nxt, _ = node
        tk = t if t < settle else settle
        key = (pos, prev, mask, tk, nxt)
        if best.get(key, INF) < g:
            continue
        if nxt == 0 and mask == everyone:
            result = _unwind(node, targets)
            break
        expanded += 1
        if time.monotonic() >= deadline:
            result = Status.TIMEOUT
            break
        successors = []
        if nxt == 0:
            for i in range(m):
                if not mask >> i & 1 and pos[i] == targets[i] and t > goal_after[i]:
                    successors.append((g, (pos, None, mask | 1 << i, t, 0, node)))
            prev = pos
        i = nxt
        while i < m and mask >> i & 1:
            i += 1
        if i < m and t < horizon:
            tab = tables[i]
            v = prev[i]
            for w in neighbors(v) + (v,):
                if w in tab.blocked_from and t + 1 >= tab.blocked_from[w]:
                    continue
                if (w, t + 1) in tab.vertex or (v, w, t) in tab.edge or w not in distances[i]:
                    continue
                clash = False
                for j in range(m):
                    if j == i:
                        continue
                    if mask >> j & 1 or j < i:
                        # j already stands at its t + 1 cell
                        if pos[j] == w or (pos[j] == v and prev[j] == w):
                            clash = True
                            break
                if clash:
                    continue
                npos = pos[:i] + (w,) + pos[i + 1 :]
                j = i + 1
                while j < m and mask >> j & 1:
                    j += 1
                if j < m:
                    successors.append((g + 1, (npos, prev, mask, t, j, node)))
                else:
                    successors.append((g + 1, (npos, None, mask, t + 1, 0, node)))
        for ng, child in successors:
            cpos, cprev, cmask, ct, cnxt, _ = child
            ckey = (cpos, cprev, cmask, ct if ct < settle else settle, cnxt)
            if best.get(ckey, INF) <= ng:
                continue
            best[ckey] = ng
            heapq.heappush(heap, (ng + h(cpos, cmask, ct, cnxt), -ng, -ct, next(tick), child))

    if stats is not None:
        stats["expanded"] = stats.get("expanded", 0) + expanded
    return result


def _unwind(node, targets) -> list:
    chain = []
    while node is not None:
        if node[4] == 0:
            chain.append(node)
        node = node[5]
    chain.reverse()
    paths = []
    for i, target in enumerate(targets):
        locs = []
        for pos, _, mask, t, _, _ in chain:
            if t == len(locs):
                locs.append(pos[i])
            if mask >> i & 1:
                break
        paths.append(_trim(locs, target))
    return paths
