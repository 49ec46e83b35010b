"""
CBS, its improved variant, and prioritized planning
===================================================

On a crowded open grid all three return valid solutions. CBS and ICBS agree
on the optimal sum of costs; prioritized planning is fast but may pay more
or fail outright.
"""
import time

from mapfkit import SEARCH_BASED, Instance, SolverBudget, cbs, make_grid, prioritized, validate
from mapfkit.benchmark_io import RandomMode, generate_scenario

grid = make_grid(8, 8, {(3, 3), (3, 4), (4, 3)})
scen = generate_scenario(grid, 12, RandomMode(), seed=5)
inst = Instance(grid, tuple(scen.sources), tuple(scen.targets))

runs = {
    "cbs": lambda b: cbs(inst, SEARCH_BASED, b),
    "icbs": lambda b: cbs(inst, SEARCH_BASED, b, prioritize_conflicts=True, bypass=True, avoid_conflicts=True),
    "prioritized": lambda b: prioritized(inst, None, SEARCH_BASED, b),
}
for name, run in runs.items():
    started = time.monotonic()
    res = run(SolverBudget.seconds(20))
    elapsed = time.monotonic() - started
    line = f"{name:12s} {res.status.value:9s} {elapsed:6.2f} s  nodes={res.high_level_expanded}"
    if res.solved:
        report = validate(inst, res.solution, SEARCH_BASED)
        line += f"  soc={report.sum_of_costs} makespan={report.makespan} valid={report.valid}"
    print(line)
