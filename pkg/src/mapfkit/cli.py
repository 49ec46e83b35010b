"""Command-line entry point: ``mapf <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 invalid solution
(``validate``), 3 timeout and 4 unsolvable (``solve`` and ``oracle``).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .benchmark_io import (
    CapacityError,
    ClusteredMode,
    DesignatedMode,
    ParseError,
    RandomMode,
    generate_scenario,
    parse_cells,
    parse_solution,
    read_map,
    read_scen,
    serialize_scen,
    serialize_solution,
)
from .harness import discover_scenarios, emit_report, get_solver, machine_description, run_benchmark
from .model import GridError, Instance, InstanceError, SemanticsProfile
from .oracle import brute_force_optimal
from .solvers import SolverBudget, Status
from .validate import ShapeError, validate

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_TIMEOUT, EXIT_UNSOLVABLE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", required=True, type=Path)
    p.add_argument("--scen", required=True, type=Path)
    p.add_argument("--agents", required=True, type=int, help="use the first N scenario entries")


def _profile_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--profile", default="vertex,edge,swapping", help="comma-joined forbidden conflict kinds")
    p.add_argument("--target-behavior", default="stay", choices=["stay", "disappear"])
    p.add_argument("--objective", default="sum_of_costs", choices=["sum_of_costs", "makespan"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mapf", description="Classical multi-agent pathfinding toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a solution file against an instance")
    _instance_args(p)
    p.add_argument("--solution", required=True, type=Path)
    _profile_args(p)

    p = sub.add_parser("solve", help="solve an instance with a search-based solver")
    _instance_args(p)
    p.add_argument("--algo", default="cbs", choices=["cbs", "icbs", "prioritized"])
    p.add_argument("--time-limit", type=float, default=30.0, help="seconds")
    p.add_argument("--out", type=Path, help="solution file (default: stdout)")

    p = sub.add_parser("bench", help="run the incremental benchmark protocol")
    p.add_argument("--maps-dir", required=True, type=Path)
    p.add_argument("--scens-dir", required=True, type=Path)
    p.add_argument("--maps", nargs="*", help="map names to run (default: every .map with scenarios)")
    p.add_argument("--algo", default="icbs", choices=["cbs", "icbs", "prioritized"])
    p.add_argument("--time-limit", type=float, default=30.0, help="seconds per problem")
    p.add_argument("--out", required=True, type=Path, help="per-problem CSV")
    p.add_argument("--summary-out", type=Path, help="per-map summary CSV")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("oracle", help="exhaustive optimum for a tiny instance")
    _instance_args(p)
    _profile_args(p)
    p.add_argument("--horizon", type=int)

    p = sub.add_parser("gen-scen", help="generate a scenario file")
    p.add_argument("--map", required=True, type=Path)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--mode", default="random", help="random | clustered:R | designated:SFILE,TFILE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)
    return parser


def _load_instance(args) -> Instance:
    grid = read_map(args.map)
    scen = read_scen(args.scen)
    if not 1 <= args.agents <= len(scen):
        raise UsageError(f"--agents must be between 1 and {len(scen)} for {args.scen}")
    entries = scen.entries[: args.agents]
    return Instance(grid, tuple(e.start for e in entries), tuple(e.goal for e in entries))


def _profile(args) -> SemanticsProfile:
    return SemanticsProfile.parse(args.profile, args.target_behavior, args.objective)


def _parse_mode(text: str):
    name, _, arg = text.partition(":")
    if name == "random" and not arg:
        return RandomMode()
    if name == "clustered" and arg:
        return ClusteredMode(int(arg))
    if name == "designated" and arg:
        sfile, sep, tfile = arg.partition(",")
        if sep:
            return DesignatedMode(parse_cells(Path(sfile).read_bytes()), parse_cells(Path(tfile).read_bytes()))
    raise UsageError(f"bad --mode {text!r}; expected random, clustered:R or designated:SFILE,TFILE")


def cmd_validate(args) -> int:
    instance = _load_instance(args)
    solution = parse_solution(args.solution.read_bytes())
    report = validate(instance, solution, _profile(args))
    print(report.format())
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_solve(args) -> int:
    instance = _load_instance(args)
    res = get_solver(args.algo)(instance, SolverBudget.seconds(args.time_limit))
    if res.status is Status.TIMEOUT:
        print(f"status: timeout after {args.time_limit:g} s")
        return EXIT_TIMEOUT
    if not res.solved:
        print(f"status: {res.status.value}" + (f" ({res.message})" if res.message else ""))
        return EXIT_UNSOLVABLE
    data = serialize_solution(res.solution)
    if args.out:
        args.out.write_bytes(data)
        print(f"status: solved\nsum_of_costs: {res.cost}\nruntime_s: {res.runtime:.3f}")
    else:
        sys.stdout.write(data.decode("ascii"))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    names = args.maps or sorted(p.stem for p in args.maps_dir.glob("*.map"))
    maps, scens = {}, {}
    for name in names:
        maps[name] = args.maps_dir / f"{name}.map"
        scens[name] = discover_scenarios(maps[name], args.scens_dir)
        if not scens[name]:
            if args.maps:
                raise FileNotFoundError(f"no {name}-random-*.scen files in {args.scens_dir}")
            del maps[name], scens[name]
    if not maps:
        raise UsageError(f"no map in {args.maps_dir} has scenarios in {args.scens_dir}")
    summaries = run_benchmark(get_solver(args.algo), maps, scens, args.time_limit, args.jobs)
    machine = machine_description()
    args.out.write_bytes(emit_report(summaries, "csv", summary=False, machine=machine))
    if args.summary_out:
        args.summary_out.write_bytes(emit_report(summaries, "csv", summary=True, machine=machine))
    sys.stdout.write(emit_report(summaries, "table").decode("utf-8"))
    return EXIT_OK


def cmd_oracle(args) -> int:
    instance = _load_instance(args)
    res = brute_force_optimal(instance, _profile(args), args.horizon)
    if not res.solved:
        print(f"status: unsolvable within horizon ({res.message})")
        return EXIT_UNSOLVABLE
    print(f"cost: {res.cost}")
    sys.stdout.write(serialize_solution(res.solution).decode("ascii"))
    return EXIT_OK


def cmd_gen_scen(args) -> int:
    grid = read_map(args.map)
    scen = generate_scenario(grid, args.n, _parse_mode(args.mode), args.seed, args.map.name)
    args.out.write_bytes(serialize_scen(scen))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "bench": cmd_bench,
    "oracle": cmd_oracle,
    "gen-scen": cmd_gen_scen,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
    except (UsageError, ParseError, GridError, InstanceError, ShapeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
