"""
Sum of costs counts the last arrival
====================================

An agent that reaches its target, leaves, and comes back is charged up to
its final arrival. The exhaustive oracle then shows how the objective and
the target behavior change the optimum of one small instance.
"""
from mapfkit import Instance, Plan, SemanticsProfile, brute_force_optimal, make_grid
from mapfkit.objective import plan_cost

t, side = (3, 0), (3, 1)
detour = Plan(0, ((0, 0), (1, 0), (2, 0), t, t, t, side, t, t, t))
print("arrive 3, leave 5, return 7 ->", plan_cost(detour))

# %%
# Agent 0 starts on its target, in the middle of agent 1's corridor.
grid = make_grid(5, 2, {(0, 1), (1, 1), (3, 1), (4, 1)})
inst = Instance(grid, ((2, 0), (0, 0)), ((2, 0), (4, 0)))

for behavior in ("stay", "disappear"):
    for objective in ("sum_of_costs", "makespan"):
        profile = SemanticsProfile(target_behavior=behavior, objective=objective)
        res = brute_force_optimal(inst, profile)
        print(f"{behavior:9s} {objective:12s} -> {res.cost}")
        for plan in res.solution:
            print("   ", plan.agent, plan.locations)
