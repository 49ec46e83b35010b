"""
Which plans collide depends on what you forbid
==============================================

Two agents follow each other down a corridor while a third pair swaps
places. We ask the detector for every witness, then see which ones each
semantics profile actually forbids.
"""
from mapfkit import PEBBLE_MOTION, SEARCH_BASED, Plan, SemanticsProfile, make_grid, solution_conflicts
from mapfkit.conflict import cycle_conflicts, pairwise_conflicts

grid = make_grid(5, 2)

# Agent 1 steps into the cell agent 0 just left: a following conflict.
leader = Plan(0, ((1, 0), (2, 0), (3, 0)), grid)
follower = Plan(1, ((0, 0), (1, 0), (2, 0)), grid)
for c in pairwise_conflicts(leader, follower):
    print(f"t={c.time} {c.kind.value:9s} agents={c.agents} at {c.vertices}")

# The usual search-based setting allows it; pebble motion does not.
print("search-based:", solution_conflicts([leader, follower], SEARCH_BASED))
print("pebble motion:", [c.kind.value for c in solution_conflicts([leader, follower], PEBBLE_MOTION)])

# %%
# A head-on swap is a two-agent rotation, so it shows up as a cycle too.
a = Plan(0, ((0, 1), (1, 1)), grid)
b = Plan(1, ((1, 1), (0, 1)), grid)
print([(c.kind.value, c.agents) for c in cycle_conflicts([a, b])])

# %%
# Forbidding a kind drags in everything it dominates.
print(SemanticsProfile.parse("following").describe())
print(SemanticsProfile.parse("vertex").describe())

# %%
# Under stay-at-target a parked agent is an obstacle; under disappear it is gone.
parked = Plan(0, ((3, 1), (2, 1)), grid)
passer = Plan(1, ((4, 1), (3, 1), (2, 1), (1, 1)), grid)
for behavior in ("stay", "disappear"):
    hits = pairwise_conflicts(parked, passer, {"vertex"}, behavior)
    print(behavior, [(c.time, c.vertices[0]) for c in hits])
