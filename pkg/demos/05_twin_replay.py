"""
Replaying a graph in the digital twin
=====================================

The twin executes a task graph against simulated plates, judging every
step three ways: structural feasibility, tool operability, and reach.
Reversing the graph gives the teardown; a clean round trip ends with the
assembly plate empty and the storage plate exactly as it started.
"""

import random

from brickworks.demogen import random_script
from brickworks.taskgraph import reverse
from brickworks.twin import TwinSession, verify_roundtrip
from brickworks.world import Catalog

catalog = Catalog.default()
rng = random.Random(11)

graph, storage = random_script(rng, catalog, dims=(16, 16, 8), n_bricks=4)

# Step through interactively, with rewind.
session = TwinSession(graph, storage)
record = session.step()
print(f"step {record.index}: applied={record.applied}, ok={record.fully_ok}")
session.step()
session.rewind(0)
assert session.storage_state == storage
print("rewound to the initial layout")

# Full round trip: build it, then put every brick back.
trip = verify_roundtrip(graph, storage)
print(f"\nforward report:  {trip.forward.overall}")
print(f"teardown report: {trip.reverse.overall}")
assert trip.final_assembly.placements == {}
assert trip.final_storage == storage
print("assembly plate empty, storage restored brick for brick\n")

print(trip.forward.render())
print(trip.reverse.render())
print(f"(the teardown is {reverse(graph).direction}-direction, "
      f"{len(reverse(graph))} nodes)")
