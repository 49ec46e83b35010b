"""Incremental benchmark protocol and report writers.

For every scenario, problems with n = 2, 3, ... agents are built from the
first n entries and solved one after another, each with a fresh wall-clock
budget, until the first problem that is not solved.
"""
from __future__ import annotations

import csv
import io
import os
import platform
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .benchmark_io import CapacityError, Scenario, read_map, read_scen
from .model import SEARCH_BASED, Grid, Instance, InstanceError
from .solvers import SolverBudget, SolverResult, Status, cbs, prioritized
from .validate import validate

Solver = Callable[[Instance, SolverBudget], SolverResult]

PROBLEM_HEADER = ("map", "scenario", "n_agents", "status", "runtime_ms", "soc", "makespan")
SUMMARY_HEADER = ("map", "width", "height", "problems", "solved", "min", "max")


def _cbs(instance: Instance, budget: SolverBudget, **options) -> SolverResult:
    return cbs(instance, SEARCH_BASED, budget, **options)


def _prioritized(instance: Instance, budget: SolverBudget) -> SolverResult:
    return prioritized(instance, None, SEARCH_BASED, budget)


# Module-level partials so that solvers pickle into worker processes.
SOLVERS: dict[str, Solver] = {
    "cbs": _cbs,
    # merging costs 3-8 agents per scenario on open 8x8 grids, so it is off here
    "icbs": partial(_cbs, prioritize_conflicts=True, bypass=True, avoid_conflicts=True, merge_threshold=None),
    "prioritized": _prioritized,
}


def get_solver(name: str) -> Solver:
    try:
        return SOLVERS[name]
    except KeyError:
        raise ValueError(f"unknown solver {name!r}; choose from {', '.join(SOLVERS)}") from None


@dataclass(frozen=True)
class ProblemRecord:
    n: int
    status: str
    runtime_ms: float
    soc: Optional[int] = None
    makespan: Optional[int] = None


@dataclass
class ScenarioResult:
    map_name: str
    scenario_id: str
    max_agents_solved: int
    per_n: list[ProblemRecord] = field(default_factory=list)
    entries: int = 0


@dataclass
class MapSummary:
    map_name: str
    width: int
    height: int
    problems: int
    solved: int
    min: int
    max: int
    scenarios: list[ScenarioResult] = field(default_factory=list)


def run_scenario(
    solver: Solver,
    grid: Grid,
    scenario: Scenario,
    time_limit: float = 30.0,
    *,
    map_name: str = "",
    scenario_id: str = "",
) -> ScenarioResult:
    """Run the incremental protocol on one scenario.

    Every returned solution is re-validated; an invalid one counts as a
    ``failure``. ``timeout`` and ``failure`` (which includes unsolvable) end
    the scenario.
    """
    if len(scenario) < 2:
        raise CapacityError(f"scenario {scenario_id or '?'} has {len(scenario)} entries; the protocol needs at least 2")
    result = ScenarioResult(map_name, scenario_id, 0, entries=len(scenario))
    sources, targets = scenario.sources, scenario.targets
    for n in range(2, len(scenario) + 1):
        started = time.monotonic()
        try:
            instance = Instance(grid, tuple(sources[:n]), tuple(targets[:n]))
        except InstanceError:
            result.per_n.append(ProblemRecord(n, "failure", 0.0))
            break
        res = solver(instance, SolverBudget.seconds(time_limit))
        elapsed = (time.monotonic() - started) * 1000.0
        if res.status is Status.TIMEOUT:
            result.per_n.append(ProblemRecord(n, "timeout", elapsed))
            break
        if not res.solved or res.solution is None:
            result.per_n.append(ProblemRecord(n, "failure", elapsed))
            break
        report = validate(instance, res.solution, SEARCH_BASED)
        if not report.valid:
            result.per_n.append(ProblemRecord(n, "failure", elapsed))
            break
        result.per_n.append(ProblemRecord(n, "solved", elapsed, report.sum_of_costs, report.makespan))
        result.max_agents_solved = n
    return result


def summarize(map_name: str, grid: Grid, results: Sequence[ScenarioResult]) -> MapSummary:
    maxima = [r.max_agents_solved for r in results]
    return MapSummary(
        map_name=map_name,
        width=grid.width,
        height=grid.height,
        problems=sum(r.entries for r in results),
        solved=sum(m - 1 for m in maxima if m >= 2),
        min=min(maxima, default=0),
        max=max(maxima, default=0),
        scenarios=list(results),
    )


def discover_scenarios(map_path: Union[str, os.PathLike], scens_dir: Union[str, os.PathLike]) -> list[Path]:
    """``<map stem>-random-<i>.scen`` files in ``scens_dir``, ordered by ``i``."""
    stem = Path(map_path).stem
    pattern = re.compile(re.escape(stem) + r"-random-(\d+)\.scen$")
    found = []
    for p in Path(scens_dir).iterdir():
        m = pattern.match(p.name)
        if m:
            found.append((int(m.group(1)), p))
    return [p for _, p in sorted(found)]


def _scenario_job(solver, map_path, scen_path, time_limit, map_name):
    grid = read_map(map_path)
    return run_scenario(
        solver, grid, read_scen(scen_path), time_limit, map_name=map_name, scenario_id=Path(scen_path).stem
    )


def run_benchmark(
    solver: Solver,
    maps: Mapping[str, Union[str, os.PathLike]],
    scenarios: Mapping[str, Sequence[Union[str, os.PathLike]]],
    time_limit: float = 30.0,
    jobs: int = 1,
) -> list[MapSummary]:
    """Run every (map, scenario) pair and aggregate one summary per map.

    ``maps`` maps a map name to its file; ``scenarios`` maps the same name to
    its scenario files. Scenarios may run in ``jobs`` worker processes.
    """
    for name, path in maps.items():
        if not scenarios.get(name):
            raise ValueError(f"map {name!r} has no scenarios")
        for p in [path, *scenarios[name]]:
            if not Path(p).is_file():
                raise FileNotFoundError(f"benchmark file not found: {p}")
    tasks = [(solver, maps[name], scen, time_limit, name) for name in maps for scen in scenarios[name]]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_scenario_job, *zip(*tasks)))
    else:
        outcomes = [_scenario_job(*t) for t in tasks]
    summaries = []
    for name, path in maps.items():
        mine = [r for r in outcomes if r.map_name == name]
        summaries.append(summarize(name, read_map(path), mine))
    return summaries


def machine_description() -> str:
    return f"{platform.platform()}; python {platform.python_version()}; {os.cpu_count()} cpu"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def emit_report(
    items: Iterable[Union[ScenarioResult, MapSummary]],
    fmt: str = "csv",
    *,
    summary: Optional[bool] = None,
    machine: Optional[str] = None,
) -> bytes:
    """Render results as CSV or as a human-readable summary table.

    CSV of :class:`ScenarioResult` items gives one row per attempted problem;
    CSV of :class:`MapSummary` items gives one row per map. ``summary``
    chooses the header for an empty list (per-problem by default).
    ``machine``, when given, is written first as a ``#`` comment line.
    """
    items = list(items)
    if summary is None:
        summary = bool(items) and isinstance(items[0], MapSummary)
    buf = io.StringIO()
    if machine:
        buf.write(f"# machine: {machine}\n")
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        if summary:
            writer.writerow(SUMMARY_HEADER)
            for s in items:
                writer.writerow([s.map_name, s.width, s.height, s.problems, s.solved, s.min, s.max])
        else:
            writer.writerow(PROBLEM_HEADER)
            results = [r for s in items for r in s.scenarios] if items and isinstance(items[0], MapSummary) else items
            for r in results:
                for rec in r.per_n:
                    writer.writerow([_fmt(v) for v in (r.map_name, r.scenario_id, rec.n, rec.status,
                                                       rec.runtime_ms, rec.soc, rec.makespan)])
    elif fmt == "table":
        if not summary:
            raise ValueError("table format renders map summaries")
        rows = [("Map", "Size", "Problems", "Solved", "Min", "Max")]
        rows += [(s.map_name, f"{s.width}x{s.height}", str(s.problems), str(s.solved), str(s.min), str(s.max))
                 for s in items]
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        for r in rows:
            buf.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return buf.getvalue().encode("utf-8")
