"""
The incremental benchmark protocol
==================================

Each scenario is an ordered list of source/target pairs. The harness solves
the first 2 agents, then 3, and so on, each problem with a fresh time limit,
and stops at the first problem it cannot solve.

This demo generates a few scenarios on an open 8x8 map and uses a short time
limit so it finishes quickly. Point the CLI at real benchmark files for the
full protocol::

    mapf bench --maps-dir maps --scens-dir scens --algo icbs --time-limit 30 --out results.csv
"""
import sys

from mapfkit import make_grid
from mapfkit.benchmark_io import RandomMode, generate_scenario
from mapfkit.harness import emit_report, get_solver, run_scenario, summarize

limit = float(sys.argv[1]) if len(sys.argv) > 1 else 2.0
grid = make_grid(8, 8)
results = []
for seed in range(1, 4):
    scen = generate_scenario(grid, 32, RandomMode(), seed, "empty-8-8.map")
    res = run_scenario(get_solver("icbs"), grid, scen, limit, map_name="empty-8-8", scenario_id=f"random-{seed}")
    last = res.per_n[-1]
    print(f"{res.scenario_id}: solved up to {res.max_agents_solved} agents; stopped at n={last.n} ({last.status})")
    results.append(res)

sys.stdout.write(emit_report(results).decode()[:400] + "...\n\n")
sys.stdout.write(emit_report([summarize("empty-8-8", grid, results)], "table").decode())
