"""
Planning an assembly order
==========================

When no human demonstration exists, the planner searches for an order
that passes every check the twin would apply. On small instances the
exhaustive enumerator certifies it: the planner finds an order exactly
when some permutation of the bricks is valid.
"""

from brickworks.scenarios import tight_gap_storage, tight_gap_target
from brickworks.sequencer import SequencingProblem, exhaustive_orders, find_order
from brickworks.twin import execute
from brickworks.world import BrickPlacement, Catalog, WorkspaceState, place

catalog = Catalog.default()

# The tight-gap towers: the planner must press the slot brick early.
problem = SequencingProblem(tight_gap_target(), tight_gap_storage())
graph = find_order(problem)
order = [(n.index, n.brick_type, n.assembly_pose.z) for n in graph.nodes]
print("planned order (index, type, layer):")
for entry in order:
    print(f"  {entry}")
report = execute(graph, problem.storage, problem.tool, problem.envelope())
print(f"twin verdict: {report.overall}")

# A small instance the oracle can enumerate completely.
target = WorkspaceState.empty("assembly", (8, 8, 6), catalog)
target = place(target, BrickPlacement(1, "2x2_red", 2, 2, 1, 0))
target = place(target, BrickPlacement(2, "2x2_blue", 2, 2, 2, 0))
target = place(target, BrickPlacement(3, "1x2_green", 5, 2, 1, 0))

storage = WorkspaceState.empty("storage", (8, 8, 6), catalog)
for i, (t, x) in enumerate([("2x2_red", 0), ("2x2_blue", 3), ("1x2_green", 6)], 1):
    storage = place(storage, BrickPlacement(i, t, x, 6, 1, 0))

small = SequencingProblem(target, storage)
orders = exhaustive_orders(small)
print(f"\nsmall stack-plus-one target: {len(orders)} valid orders of 3! = 6")
assert find_order(small) in orders
print("planner's answer is one of them")
