"""
A live demonstration session
============================

The session manager backs the HTTP service and the browser studio: a
human picks bricks off the storage plate and places them on the assembly
plate, getting an immediate verdict. Rejected moves never touch state,
so the human simply tries somewhere else. Afterwards the twin verifies
the whole graph forwards and backwards.
"""

from brickworks.service import SessionManager
from brickworks.world import BrickPlacement, Catalog, WorkspaceState, place

catalog = Catalog.default()
storage = WorkspaceState.empty("storage", (16, 16, 8), catalog)
for i, (t, x) in enumerate([("2x2_red", 0), ("2x2_blue", 3), ("2x2_green", 6)], 1):
    storage = place(storage, BrickPlacement(i, t, x, 0, 1, 0))

manager = SessionManager()
sid = manager.create_session(catalog, storage)
print(f"session {sid}: {len(storage.placements)} bricks in storage")

# A floating placement is rejected; the plates stay untouched.
feedback = manager.submit_step(sid, 1, 8, 8, 3, 0)
print(f"\nfloating attempt accepted={feedback.accepted}:")
for v in feedback.violation_dicts():
    print(f"  {v['code']}: {v['detail']}")

# Build a little tower with three accepted moves.
for instance_id, z in [(1, 1), (2, 2), (3, 3)]:
    feedback = manager.submit_step(sid, instance_id, 8, 8, z, 0)
    print(f"step {feedback.node.index}: {feedback.node.brick_type} -> layer {z}")

trip = manager.verify(sid)
print(f"\nround-trip verification: forward {trip.forward.overall}, "
      f"teardown {trip.reverse.overall}")
print(f"graph id {trip.forward.graph_id}, {len(trip.forward.steps)} steps each way")
