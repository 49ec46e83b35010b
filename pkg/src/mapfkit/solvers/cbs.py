"""Conflict-based search, optimal for sum of costs under stay-at-target.

The high level is best-first over constraint-tree nodes ordered by
``(sum of costs, number of conflicts, creation order)``. Each expansion takes
the earliest conflict and splits it into two children that each constrain one
of the two agents; the constrained agent is replanned with space-time A*.
Groups of agents that keep conflicting are merged and planned jointly (see
``merge_threshold``), which closes large cost gaps that plain splitting
cannot.

Conflicts handled: vertex conflicts and swapping conflicts. When one agent
passes another that is already parked on its target, the two children either
make the parked agent arrive later or keep the passer off that target for
good. Edge conflicts coincide with vertex conflicts and
following/cycle conflicts are allowed, so nothing else is needed.
"""
from __future__ import annotations

import heapq
import itertools
import time
from typing import Optional, Sequence

from ..model import SEARCH_BASED, ConflictKind, Instance, Objective, Plan, SemanticsProfile, Solution, TargetBehavior, Vertex
from .common import UNLIMITED, SolverBudget, SolverResult, Status
from .joint_astar import joint_astar
from .space_time_astar import Constraint, ConstraintTable, space_time_astar

VERTEX, SWAP = 0, 1

# Internal conflict record: (time, kind, a, b, u, v). For a vertex conflict
# u is the shared vertex and v is None; for a swap agent a moves u -> v while
# agent b moves v -> u between time and time + 1.
Record = tuple


def check_profile(profile: SemanticsProfile) -> None:
    need = {ConflictKind.VERTEX, ConflictKind.EDGE, ConflictKind.SWAPPING}
    if (
        not need <= profile.forbidden
        or ConflictKind.FOLLOWING in profile.forbidden
        or ConflictKind.CYCLE in profile.forbidden
        or profile.target_behavior is not TargetBehavior.STAY
        or profile.objective is not Objective.SUM_OF_COSTS
    ):
        raise ValueError(
            "CBS solves vertex/edge/swapping-forbidden, following-allowed, "
            f"stay-at-target, sum-of-costs problems; got {profile}"
        )


def pair_conflicts(pa: Sequence[Vertex], pb: Sequence[Vertex], a: int, b: int) -> list[Record]:
    """Vertex and swapping conflicts between two location sequences (stay at target)."""
    la, lb = len(pa) - 1, len(pb) - 1
    horizon = la if la > lb else lb
    ta, tb = pa[-1], pb[-1]
    out = []
    for x in range(horizon + 1):
        u = pa[x] if x <= la else ta
        v = pb[x] if x <= lb else tb
        if u == v:
            out.append((x, VERTEX, a, b, u, None))
        elif x < horizon:
            u1 = pa[x + 1] if x < la else ta
            if u1 == v:
                v1 = pb[x + 1] if x < lb else tb
                if v1 == u:
                    out.append((x, SWAP, a, b, u, v))
    return out


class _Node:
    __slots__ = ("paths", "constraints", "conflicts", "cost", "depth", "mdds")

    def __init__(self, paths, constraints, conflicts, cost, depth, mdds=None):
        self.paths = paths
        self.constraints = constraints
        self.conflicts = conflicts
        self.cost = cost
        self.depth = depth
        self.mdds = mdds if mdds is not None else {}


def build_mdd(grid, source, target, table: ConstraintTable, cost: int, dist) -> list[frozenset]:
    """Per time step, the vertices some cost-``cost`` plan can occupy.

    Only plans that respect ``table`` and end on ``target`` at ``cost`` count.
    """
    levels = [{source}]
    for t in range(1, cost + 1):
        nxt = set()
        remaining = cost - t
        for u in levels[-1]:
            for w in grid.neighbors(u) + (u,):
                if dist.get(w, remaining + 1) > remaining:
                    continue
                if (w, t) in table.vertex or (u, w, t - 1) in table.edge:
                    continue
                if w in table.blocked_from and t >= table.blocked_from[w]:
                    continue
                nxt.add(w)
        levels.append(nxt)
    if target not in levels[-1]:
        return [frozenset() for _ in levels]
    levels[-1] = {target}
    for t in range(cost - 1, -1, -1):
        after = levels[t + 1]
        levels[t] = {
            u
            for u in levels[t]
            if any(w in after and (u, w, t) not in table.edge for w in grid.neighbors(u) + (u,))
        }
    return [frozenset(level) for level in levels]


def _singleton(mdd: list[frozenset], t: int, v: Vertex) -> bool:
    return t < len(mdd) and len(mdd[t]) == 1 and v in mdd[t]


def _cardinality(conflict: Record, mdd_a: list, mdd_b: list) -> int:
    """2 for cardinal, 1 for semi-cardinal, 0 otherwise."""
    t, kind, _, _, u, v = conflict
    if kind == VERTEX:
        # an agent already parked on u must arrive later, so its cost always grows
        hits = [t >= len(m) - 1 or _singleton(m, t, u) for m in (mdd_a, mdd_b)]
    else:
        hits = [
            _singleton(mdd_a, t, u) and _singleton(mdd_a, t + 1, v),
            _singleton(mdd_b, t, v) and _singleton(mdd_b, t + 1, u),
        ]
    return sum(hits)


def _branches(conflict: Record, paths) -> list[tuple[int, Constraint]]:
    t, kind, a, b, u, v = conflict
    if kind == VERTEX:
        for parked, other in ((a, b), (b, a)):
            if t >= len(paths[parked]) - 1 and paths[parked][-1] == u:
                # Either the parked agent arrives after t, or the other agent
                # keeps off its target from t on; every solution does one.
                return [(parked, Constraint.arrive_after(parked, u, t)), (other, Constraint.from_time(other, u, t))]
        return [(a, Constraint.at(a, u, t)), (b, Constraint.at(b, u, t))]
    return [(a, Constraint.move(a, u, v, t)), (b, Constraint.move(b, v, u, t))]


def cbs(
    instance: Instance,
    profile: SemanticsProfile = SEARCH_BASED,
    budget: SolverBudget = UNLIMITED,
    *,
    max_time: Optional[int] = None,
    prioritize_conflicts: bool = False,
    bypass: bool = False,
    avoid_conflicts: bool = False,
    merge_threshold: Optional[int] = 10,
    max_group: int = 3,
) -> SolverResult:
    """Sum-of-costs optimal solution, ``TIMEOUT``, or ``UNSOLVABLE``.

    ``max_time`` bounds every agent's arrival time (default ``|V| * k``), which
    makes the constraint tree finite so that unsolvable instances terminate.
    A solution needing later arrivals is reported ``UNSOLVABLE``.
    ``budget.node_limit`` caps high-level expansions.

    The keyword switches enable the improvements of ICBS; none of them changes
    the returned cost:

    * ``prioritize_conflicts`` splits cardinal conflicts first, then
      semi-cardinal ones, judged from each agent's MDD;
    * ``bypass`` adopts a child's path into its parent when it keeps the cost
      and lowers the number of conflicts;
    * ``avoid_conflicts`` makes the low level prefer, among equally short
      paths, those that meet fewer other agents;
    * ``merge_threshold`` (on by default; ``None`` gives plain CBS) merges
      two groups of agents once more than that
      many of their conflicts have been split, as long as the merged group has
      at most ``max_group`` agents, and restarts from a root where the group
      is planned jointly.
    """
    check_profile(profile)
    started = time.monotonic()
    grid = instance.grid
    k = instance.k
    if max_time is None:
        max_time = grid.num_vertices * k
    low_budget = SolverBudget(budget.wall_deadline)
    dists = [grid.bfs_distances(t) for t in instance.targets]
    stats: dict = {}
    expanded = 0
    bypasses = 0
    merges = 0

    def result(status: Status, node: Optional[_Node] = None, message: str = "") -> SolverResult:
        sol = None
        if node is not None:
            sol = Solution(tuple(Plan(i, p, grid) for i, p in enumerate(node.paths)))
        return SolverResult(
            status,
            sol,
            node.cost if node is not None else None,
            high_level_expanded=expanded,
            low_level_expanded=stats.get("expanded", 0),
            runtime=time.monotonic() - started,
            message=message,
            extra={"bypasses": bypasses, "merges": merges},
        )

    def avoid_table(paths, agent: int) -> Optional[dict]:
        if not avoid_conflicts:
            return None
        table: dict = {}
        horizon = max(len(p) for p in paths if p is not None) + 1
        for other, p in enumerate(paths):
            if other == agent or p is None:
                continue
            for t, v in enumerate(p):
                table[(v, t)] = table.get((v, t), 0) + 1
            for t in range(len(p), horizon + 1):
                table[(p[-1], t)] = table.get((p[-1], t), 0) + 1
        return table

    def plan(agent: int, constraints: tuple, paths=None) -> Plan | Status:
        return space_time_astar(
            grid,
            instance.sources[agent],
            instance.targets[agent],
            ConstraintTable(constraints),
            horizon=max_time,
            budget=low_budget,
            agent=agent,
            distances=dists[agent],
            avoid=avoid_table(paths, agent) if paths is not None else None,
            stats=stats,
        )

    def plan_group(members: tuple, constraints, paths=None) -> dict | Status:
        """New location sequences for every agent in ``members``."""
        if len(members) == 1:
            (agent,) = members
            res = plan(agent, constraints[agent], paths)
            return res if isinstance(res, Status) else {agent: res.locations}
        res = joint_astar(
            grid,
            [instance.sources[a] for a in members],
            [instance.targets[a] for a in members],
            [ConstraintTable(constraints[a]) for a in members],
            max_time,
            low_budget,
            distances=[dists[a] for a in members],
            stats=stats,
        )
        return res if isinstance(res, Status) else dict(zip(members, res))

    def mdd(node: _Node, agent: int) -> list:
        m = node.mdds.get(agent)
        if m is None:
            m = build_mdd(
                grid,
                instance.sources[agent],
                instance.targets[agent],
                ConstraintTable(node.constraints[agent]),
                len(node.paths[agent]) - 1,
                dists[agent],
            )
            node.mdds[agent] = m
        return m

    def choose(node: _Node) -> Record:
        ordered = sorted(node.conflicts)
        if not prioritize_conflicts:
            return ordered[0]
        best, best_rank = ordered[0], -1
        for c in ordered:
            rank = _cardinality(c, mdd(node, c[2]), mdd(node, c[3]))
            if rank > best_rank:
                best, best_rank = c, rank
                if rank == 2:
                    break
        return best

    def conflicts_between(paths) -> list:
        return [
            c
            for a, b in itertools.combinations(range(k), 2)
            if group_of[a] is not group_of[b]
            for c in pair_conflicts(paths[a], paths[b], a, b)
        ]

    def make_root() -> Optional[_Node] | SolverResult:
        paths: list = [None] * k
        for members in dict.fromkeys(group_of):
            res = plan_group(members, ((),) * k, paths if any(paths) else None)
            if res is Status.TIMEOUT:
                return result(Status.TIMEOUT)
            if res is Status.NO_PATH:
                return result(Status.UNSOLVABLE, message=f"agents {list(members)} have no path")
            for a, p in res.items():
                paths[a] = p
        return _Node(paths, ((),) * k, conflicts_between(paths), sum(len(p) - 1 for p in paths), 0)

    group_of = [(a,) for a in range(k)]
    root = make_root()
    if isinstance(root, SolverResult):
        return root
    pair_counts: dict = {}
    counter = itertools.count()
    open_list = [(root.cost, len(root.conflicts), next(counter), root)]
    while open_list:
        if budget.expired(expanded):
            return result(Status.TIMEOUT)
        _, _, _, node = heapq.heappop(open_list)
        if not node.conflicts:
            return result(Status.SOLVED, node)
        expanded += 1
        conflict = choose(node)
        if merge_threshold is not None:
            ga, gb = group_of[conflict[2]], group_of[conflict[3]]
            pair = (ga, gb) if ga < gb else (gb, ga)
            pair_counts[pair] = pair_counts.get(pair, 0) + 1
            if pair_counts[pair] > merge_threshold and len(ga) + len(gb) <= max_group:
                # merge and restart: plan the pair jointly from a fresh root
                merged = tuple(sorted(ga + gb))
                group_of = [merged if g in (ga, gb) else g for g in group_of]
                merges += 1
                pair_counts = {}
                root = make_root()
                if isinstance(root, SolverResult):
                    return root
                open_list = [(root.cost, len(root.conflicts), next(counter), root)]
                continue
        children = []
        for agent, constraint in _branches(conflict, node.paths):
            cons = list(node.constraints)
            cons[agent] = cons[agent] + (constraint,)
            members = group_of[agent]
            res = plan_group(members, cons, node.paths)
            if res is Status.TIMEOUT:
                return result(Status.TIMEOUT)
            if res is Status.NO_PATH:
                continue
            paths = list(node.paths)
            cost = node.cost
            for a, p in res.items():
                cost += len(p) - len(paths[a])
                paths[a] = p
            kept = [c for c in node.conflicts if c[2] not in members and c[3] not in members]
            for a in members:
                for other in range(k):
                    if other in members:
                        continue
                    x, y = (a, other) if a < other else (other, a)
                    kept.extend(pair_conflicts(paths[x], paths[y], x, y))
            if bypass and cost == node.cost and len(kept) < len(node.conflicts):
                # The new paths also satisfy the parent's constraints: adopt
                # them and retry the parent instead of branching.
                mdds = {a: m for a, m in node.mdds.items() if a not in members}
                node = _Node(paths, node.constraints, kept, cost, node.depth, mdds)
                bypasses += 1
                children = None
                break
            mdds = {a: m for a, m in node.mdds.items() if a not in members}
            children.append(_Node(paths, tuple(cons), kept, cost, node.depth + 1, mdds))
        if children is None:
            heapq.heappush(open_list, (node.cost, len(node.conflicts), next(counter), node))
            continue
        for child in children:
            heapq.heappush(open_list, (child.cost, len(child.conflicts), next(counter), child))
    return result(Status.UNSOLVABLE, message=f"constraint tree exhausted with arrivals capped at t={max_time}")
