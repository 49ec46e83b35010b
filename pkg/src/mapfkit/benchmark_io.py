"""Reading and writing grid benchmark maps, scenarios and solution files.

Map files::

    type octile
    height H
    width W
    map
    <H rows of W characters>

Scenario files are ``version 1`` followed by tab-separated lines of
``bucket map width height start_x start_y goal_x goal_y optimal_length``.
The optimal length is octile distance (diagonals cost sqrt 2); it is kept as
a :class:`~decimal.Decimal` so files round-trip byte for byte.
"""
from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import ndimage

from .model import Grid, Solution, Vertex, neighborhood_moves

PASSABLE_CHARS = frozenset(".GS")
BLOCKED_CHARS = frozenset("@OTW")

Text = Union[str, bytes]


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class CapacityError(ValueError):
    """Not enough eligible cells (or entries) for the request."""


def _lines(text: Text) -> list[str]:
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def parse_map(text: Text) -> Grid:
    lines = _lines(text)
    header: dict[str, str] = {}
    n = 0
    while n < len(lines) and lines[n].strip() != "map":
        parts = lines[n].split()
        if len(parts) != 2:
            raise ParseError(f"malformed header line {lines[n]!r}", n + 1)
        header[parts[0]] = parts[1]
        n += 1
    if n == len(lines):
        raise ParseError("missing 'map' line")
    for key in ("type", "height", "width"):
        if key not in header:
            raise ParseError(f"missing '{key}' header")
    try:
        height, width = int(header["height"]), int(header["width"])
    except ValueError as exc:
        raise ParseError(f"non-integer dimensions: {exc}") from None
    if height < 1 or width < 1:
        raise ParseError(f"dimensions must be positive, got {width}x{height}")
    rows = lines[n + 1 :]
    if len(rows) != height:
        raise ParseError(f"expected {height} map rows, found {len(rows)}", n + 1 + len(rows))
    mask = np.zeros((height, width), dtype=bool)
    for y, row in enumerate(rows):
        lineno = n + 2 + y
        if len(row) != width:
            raise ParseError(f"row {y} has {len(row)} characters, expected {width}", lineno)
        for x, ch in enumerate(row):
            if ch in PASSABLE_CHARS:
                mask[y, x] = True
            elif ch not in BLOCKED_CHARS:
                raise ParseError(f"unknown map character {ch!r} at column {x}", lineno)
    return Grid(mask)


def serialize_map(grid: Grid) -> bytes:
    rows = ["".join("." if c else "@" for c in row) for row in grid.passable]
    header = ["type octile", f"height {grid.height}", f"width {grid.width}", "map"]
    return ("\n".join(header + rows) + "\n").encode("ascii")


@dataclass(frozen=True)
class ScenarioEntry:
    bucket: int
    map_name: str
    map_width: int
    map_height: int
    start: Vertex
    goal: Vertex
    optimal_length: Decimal

    def __post_init__(self):
        for label, (x, y) in (("start", self.start), ("goal", self.goal)):
            if not (0 <= x < self.map_width and 0 <= y < self.map_height):
                raise ValueError(f"{label} {(x, y)} outside {self.map_width}x{self.map_height}")


@dataclass(frozen=True)
class Scenario:
    entries: Tuple[ScenarioEntry, ...] = ()
    version: str = field(default="1", compare=False)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def sources(self) -> list[Vertex]:
        return [e.start for e in self.entries]

    @property
    def targets(self) -> list[Vertex]:
        return [e.goal for e in self.entries]


def parse_scen(text: Text) -> Scenario:
    lines = _lines(text)
    if not lines or not lines[0].startswith("version"):
        raise ParseError("missing 'version' header", 1)
    version = lines[0][len("version") :].strip()
    entries = []
    for n, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 9:
            raise ParseError(f"expected 9 tab-separated fields, found {len(fields)}", n)
        try:
            bucket, width, height, sx, sy, gx, gy = (int(fields[i]) for i in (0, 2, 3, 4, 5, 6, 7))
            opt = Decimal(fields[8])
            entry = ScenarioEntry(bucket, fields[1], width, height, (sx, sy), (gx, gy), opt)
        except (ValueError, InvalidOperation) as exc:
            raise ParseError(str(exc) or f"bad numeric field in {line!r}", n) from None
        entries.append(entry)
    return Scenario(tuple(entries), version)


def serialize_scen(scenario: Scenario) -> bytes:
    out = [f"version {scenario.version}"]
    for e in scenario.entries:
        fields = (
            e.bucket, e.map_name, e.map_width, e.map_height,
            e.start[0], e.start[1], e.goal[0], e.goal[1], e.optimal_length,
        )
        out.append("\t".join(str(f) for f in fields))
    return ("\n".join(out) + "\n").encode("ascii")


def read_map(path: Union[str, os.PathLike]) -> Grid:
    with open(path, "rb") as fh:
        return parse_map(fh.read())


def read_scen(path: Union[str, os.PathLike]) -> Scenario:
    with open(path, "rb") as fh:
        return parse_scen(fh.read())


# ---------------------------------------------------------------------------
# Solution files: one line per agent of whitespace-separated ``x,y`` tokens.


def parse_solution(text: Text, grid: Optional[Grid] = None) -> Solution:
    paths = []
    for n, line in enumerate(_lines(text), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        path = []
        for tok in line.split():
            try:
                x, y = tok.split(",")
                path.append((int(x), int(y)))
            except ValueError:
                raise ParseError(f"bad location token {tok!r}", n) from None
        paths.append(tuple(path))
    return Solution.from_paths(paths, grid)


def serialize_solution(solution: Solution) -> bytes:
    lines = [" ".join(f"{x},{y}" for x, y in plan.locations) for plan in solution]
    return ("\n".join(lines) + "\n").encode("ascii")


# ---------------------------------------------------------------------------
# Regions and scenario generation.


def largest_reachable_region(grid: Grid) -> frozenset[Vertex]:
    """Biggest 4-connected set of passable cells.

    Ties go to the component whose first cell in row-major order comes first.
    """
    labels, count = ndimage.label(grid.passable)
    if count == 0:
        return frozenset()
    sizes = np.bincount(labels.ravel())[1:]
    # ndimage numbers components in row-major order of their first cell,
    # so argmax already implements the tie-break.
    best = int(np.argmax(sizes)) + 1
    ys, xs = np.nonzero(labels == best)
    return frozenset(zip(xs.tolist(), ys.tolist()))


def octile_distance(grid: Grid, start: Vertex, goal: Vertex) -> float:
    """Shortest 8-neighbor path length without corner cutting; ``inf`` if unreachable."""
    moves = neighborhood_moves(3).moves
    dist = {start: 0.0}
    heap = [(0.0, start)]
    while heap:
        d, u = heapq.heappop(heap)
        if u == goal:
            return d
        if d > dist[u]:
            continue
        for dx, dy, cost in moves:
            v = (u[0] + dx, u[1] + dy)
            if not grid.is_passable(v):
                continue
            if dx and dy and not (grid.is_passable((u[0] + dx, u[1])) and grid.is_passable((u[0], u[1] + dy))):
                continue
            nd = d + cost
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return math.inf


@dataclass(frozen=True)
class RandomMode:
    pass


@dataclass(frozen=True)
class ClusteredMode:
    radius: int


@dataclass(frozen=True)
class DesignatedMode:
    sources: frozenset[Vertex]
    targets: frozenset[Vertex]


def _ball(grid: Grid, center: Vertex, radius: int) -> list[Vertex]:
    return sorted((v for v, d in grid.bfs_distances(center).items() if d <= radius), key=lambda v: (v[1], v[0]))


def _draw(rng: np.random.Generator, cells: Sequence[Vertex], n: int, what: str) -> list[Vertex]:
    if len(cells) < n:
        raise CapacityError(f"need {n} distinct {what} but only {len(cells)} eligible ({n - len(cells)} short)")
    idx = rng.choice(len(cells), size=n, replace=False)
    return [cells[i] for i in idx]


def generate_scenario(
    grid: Grid,
    n: int,
    mode: Union[RandomMode, ClusteredMode, DesignatedMode] = RandomMode(),
    seed: int = 0,
    map_name: str = "unnamed.map",
) -> Scenario:
    """Draw ``n`` source-target pairs with pairwise-distinct sources and targets.

    ``RandomMode`` samples both ends from the largest reachable region.
    ``ClusteredMode(r)`` places the first agent there, then keeps later sources
    (targets) within BFS distance ``r`` of the first source (target).
    ``DesignatedMode(S, T)`` samples sources from ``S`` and targets from ``T``;
    each target is drawn among the remaining cells of ``T`` connected to its source.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    row_major = lambda cells: sorted(cells, key=lambda v: (v[1], v[0]))  # noqa: E731

    if isinstance(mode, RandomMode):
        region = row_major(largest_reachable_region(grid))
        sources = _draw(rng, region, n, "sources")
        targets = _draw(rng, region, n, "targets")
    elif isinstance(mode, ClusteredMode):
        if mode.radius < 0:
            raise ValueError("cluster radius must be nonnegative")
        region = row_major(largest_reachable_region(grid))
        (s0,) = _draw(rng, region, 1, "sources")
        (t0,) = _draw(rng, region, 1, "targets")
        near_s = [v for v in _ball(grid, s0, mode.radius) if v != s0]
        near_t = [v for v in _ball(grid, t0, mode.radius) if v != t0]
        sources = [s0] + _draw(rng, near_s, n - 1, f"sources within {mode.radius} of {s0}")
        targets = [t0] + _draw(rng, near_t, n - 1, f"targets within {mode.radius} of {t0}")
    elif isinstance(mode, DesignatedMode):
        for label, cells in (("source", mode.sources), ("target", mode.targets)):
            bad = [v for v in cells if not grid.is_passable(v)]
            if bad:
                raise ValueError(f"designated {label} cells not passable: {sorted(bad)}")
        if len(mode.targets) < n:
            raise CapacityError(
                f"need {n} distinct targets but only {len(mode.targets)} designated ({n - len(mode.targets)} short)"
            )
        sources = _draw(rng, row_major(mode.sources), n, "sources")
        remaining = row_major(mode.targets)
        targets = []
        for s in sources:
            reach = grid.bfs_distances(s)
            options = [v for v in remaining if v in reach]
            if not options:
                raise CapacityError(f"no designated target left that is reachable from source {s}")
            t = options[int(rng.integers(len(options)))]
            remaining.remove(t)
            targets.append(t)
    else:
        raise TypeError(f"unknown scenario mode {mode!r}")

    entries = []
    for s, t in zip(sources, targets):
        length = octile_distance(grid, s, t)
        entries.append(
            ScenarioEntry(
                bucket=int(length // 4),
                map_name=map_name,
                map_width=grid.width,
                map_height=grid.height,
                start=s,
                goal=t,
                optimal_length=Decimal(f"{length:.8f}"),
            )
        )
    return Scenario(tuple(entries))


def parse_cells(text: Text) -> frozenset[Vertex]:
    """Whitespace-separated ``x,y`` tokens, ``#`` comments allowed."""
    cells = set()
    for n, line in enumerate(_lines(text), start=1):
        line = line.split("#", 1)[0]
        for tok in line.split():
            try:
                x, y = tok.split(",")
                cells.add((int(x), int(y)))
            except ValueError:
                raise ParseError(f"bad cell token {tok!r}", n) from None
    return frozenset(cells)
