"""
Tool clearance and assembly order
=================================

The press tool needs room: a one-stud margin around the brick and four
layers above it. Two three-layer towers with a single-stud slot between
them make the point. Pressing the slot brick last fails; pressing it
first and raising the towers afterwards works. The same clearance boxes
decide whether a brick can be twisted off again.
"""

from brickworks.manipulation import (
    ToolProfile,
    assembly_operable,
    disassembly_motion,
    removable,
)
from brickworks.scenarios import tight_gap_storage, tight_gap_target
from brickworks.twin import execute
from brickworks.scenarios import tight_gap_middle_first, tight_gap_middle_last
from brickworks.world import BrickPlacement, remove

tool = ToolProfile()  # margin 1 stud, body height 4 layers
print(f"tool: margin {tool.margin}, body height {tool.body_height}")

storage = tight_gap_storage()

print("\nmiddle brick last:")
report = execute(tight_gap_middle_last(), storage, tool)
final = report.steps[-1]
print(f"  overall {report.overall}; final step codes {final.operability.codes()}")
print(f"  blocked by tower cells {final.operability.violations[0].cells[:4]} ...")

print("\nmiddle brick first:")
report = execute(tight_gap_middle_first(), storage, tool)
print(f"  overall {report.overall}")

# Removability: the finished slot is just as tight on the way out.
target = tight_gap_target()
slot_brick = next(i for i, p in target.placements.items() if p.type_id == "1x1_red")
verdict = removable(target, slot_brick, tool)
print(f"\ntwisting the slot brick out of the finished towers: {verdict.codes()}")

# A lone brick has a free flank; the motion volumes show where the
# lever attaches and what the twist sweeps through.
lone = remove(remove(target, 1), 2)  # drop one tower's lower bricks
p = target.placements[slot_brick]
attach, sweep = disassembly_motion(p, "+y", target.catalog, tool, target.dims)
print(f"attach strip for +y: {attach[:3]} ... ({len(attach)} cells)")
print(f"twist sweep volume: {len(sweep)} cells")
