"""
Structural feasibility
======================

A structure is buildable when every brick is supported from below and
connected to the plate through stud overlaps. The classic failure is a
short brick bridging a gap it never touches: swap it for a longer brick
that rests on both piers and the verdict flips.
"""

from brickworks.feasibility import check_step, check_structure, connection_graph
from brickworks.scenarios import unsupported_bridge_states
from brickworks.world import BrickPlacement

bad, good = unsupported_bridge_states()

print("bad bridge: a red 1x2 floating between two piers")
verdict = check_structure(bad)
for v in verdict.violations:
    print(f"  {v.code} instance {v.instance_id}: {v.detail}")

print("\ngood bridge: a 1x6 spanning both piers")
verdict = check_structure(good)
print(f"  ok = {verdict.ok}")

graph = connection_graph(good)
print(f"  connection graph: {sorted(graph['plate'])} hang off the plate")

# Stepwise checking guards intermediate states too: a brick may not be
# placed floating even if a later brick would have supported it.
step = check_step(bad, BrickPlacement(9, "1x1_white", 7, 7, 3, 0))
print(f"\nplacing a brick at layer 3 over thin air: {step.codes()}")
