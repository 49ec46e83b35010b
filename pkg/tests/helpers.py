"""Shared test fixtures: random corpora and an independent conflict transcription."""
from __future__ import annotations

import itertools

import numpy as np
from hypothesis import assume
from hypothesis import strategies as st

from mapfkit.model import Grid, Instance, InstanceError, Plan, make_grid


# ---------------------------------------------------------------------------
# Definitional conflict check, written without reference to mapfkit.conflict.


def loc(path, x, stay):
    if x < len(path):
        return path[x]
    return path[-1] if stay else None


def reference_pairwise(path_i, path_j, i, j, stay):
    """Every (kind, time, agents, vertices) witness between agents ``i < j``.

    Each kind is a direct nested loop over its defining formula.
    """
    H = max(len(path_i), len(path_j)) - 1
    out = set()
    for x in range(H + 1):
        a, b = loc(path_i, x, stay), loc(path_j, x, stay)
        if a is not None and b is not None and a == b:
            out.add(("vertex", x, (i, j), (a,)))
    for x in range(H):
        a0, b0 = loc(path_i, x, stay), loc(path_j, x, stay)
        a1, b1 = loc(path_i, x + 1, stay), loc(path_j, x + 1, stay)
        if None not in (a0, b0, a1, b1) and a0 == b0 and a1 == b1:
            out.add(("edge", x, (i, j), (a0, a1)))
    for x in range(H):
        for (f, pf), (l, pl) in (((i, path_i), (j, path_j)), ((j, path_j), (i, path_i))):
            nxt, prev = loc(pf, x + 1, stay), loc(pl, x, stay)
            if nxt is not None and prev is not None and nxt == prev:
                out.add(("following", x, (f, l), (nxt,)))
    for x in range(H):
        a0, b0 = loc(path_i, x, stay), loc(path_j, x, stay)
        a1, b1 = loc(path_i, x + 1, stay), loc(path_j, x + 1, stay)
        if None not in (a0, b0, a1, b1) and a1 == b0 and b1 == a0:
            out.add(("swapping", x, (i, j), (a0, b0)))
    return out


def reference_cycles(paths, stay):
    """(time, agents in rotation order from the smallest) for every rotation, by brute force."""
    H = max(len(p) for p in paths) - 1
    out = set()
    k = len(paths)
    for x in range(H):
        for size in range(2, k + 1):
            for members in itertools.permutations(range(k), size):
                if members[0] != min(members):
                    continue
                ok = True
                for m in range(size):
                    me, nxt = members[m], members[(m + 1) % size]
                    here = loc(paths[me], x + 1, stay)
                    there = loc(paths[nxt], x, stay)
                    inside = x < max(len(paths[me]), len(paths[nxt])) - 1
                    if not inside or here is None or there is None or here != there:
                        ok = False
                        break
                if ok:
                    out.add((x, members))
    return out


def as_tuples(conflicts):
    return {(c.kind.value, c.time, c.agents, c.vertices) for c in conflicts}


# ---------------------------------------------------------------------------
# Random corpora (numpy generators, for the large acceptance runs).


def random_grid(rng: np.random.Generator, max_w=4, max_h=4, density=(0.0, 0.3)) -> Grid:
    w, h = int(rng.integers(1, max_w + 1)), int(rng.integers(1, max_h + 1))
    cells = [(x, y) for x in range(w) for y in range(h)]
    n_blocked = int(len(cells) * rng.uniform(*density))
    idx = rng.choice(len(cells), size=n_blocked, replace=False) if n_blocked else []
    return make_grid(w, h, [cells[i] for i in idx])


def random_walk(rng: np.random.Generator, grid: Grid, start, steps: int):
    path = [start]
    for _ in range(steps):
        options = grid.neighbors(path[-1]) + (path[-1],)
        path.append(options[int(rng.integers(len(options)))])
    return tuple(path)


def random_plans(rng: np.random.Generator, grid: Grid, k: int, max_steps=6):
    free = sorted(grid.vertices())
    return [
        Plan(a, random_walk(rng, grid, free[int(rng.integers(len(free)))], int(rng.integers(0, max_steps + 1))), grid)
        for a in range(k)
    ]


def random_instance(rng: np.random.Generator, max_side=5, density=(0.1, 0.3), agents=(2, 3)):
    """A connected-endpoint instance on a small grid, or ``None`` when the draw fails."""
    grid = random_grid(rng, max_side, max_side, density)
    free = sorted(grid.vertices())
    k = int(rng.integers(agents[0], agents[1] + 1))
    if len(free) < k:
        return None
    src = [free[i] for i in rng.choice(len(free), size=k, replace=False)]
    dst = [free[i] for i in rng.choice(len(free), size=k, replace=False)]
    try:
        return Instance(grid, tuple(src), tuple(dst))
    except InstanceError:
        return None


# ---------------------------------------------------------------------------
# Hypothesis strategies.


@st.composite
def grids(draw, max_w=4, max_h=4, min_cells=1):
    w = draw(st.integers(1, max_w))
    h = draw(st.integers(1, max_h))
    cells = [(x, y) for x in range(w) for y in range(h)]
    blocked = draw(st.sets(st.sampled_from(cells), max_size=max(0, len(cells) - min_cells)))
    return make_grid(w, h, blocked)


@st.composite
def walks(draw, grid: Grid, max_steps=6, start=None):
    free = sorted(grid.vertices())
    path = [start if start is not None else draw(st.sampled_from(free))]
    for _ in range(draw(st.integers(0, max_steps))):
        path.append(draw(st.sampled_from(grid.neighbors(path[-1]) + (path[-1],))))
    return tuple(path)


@st.composite
def plan_sets(draw, k_min=2, k_max=3, max_steps=6):
    grid = draw(grids())
    k = draw(st.integers(k_min, k_max))
    return grid, [Plan(a, draw(walks(grid, max_steps)), grid) for a in range(k)]


@st.composite
def instances(draw, max_side=4, k_max=2):
    grid = draw(grids(max_side, max_side, min_cells=2))
    free = sorted(grid.vertices())
    k = draw(st.integers(1, min(k_max, len(free))))
    src = draw(st.permutations(free))[:k]
    dst = draw(st.permutations(free))[:k]
    try:
        return Instance(grid, tuple(src), tuple(dst))
    except InstanceError:
        assume(False)
