"""
Plates, bricks, and occupancy
=============================

The world model is a pair of stud grids. Bricks come from a catalog of
footprints and colors; placements put them at integer poses; states are
immutable values, so every mutation returns a new state.
"""

from brickworks.world import (
    ASSEMBLY,
    BrickPlacement,
    Catalog,
    WorkspaceState,
    dump_structure,
    place,
    remove,
)
from brickworks.errors import CellOccupiedError

catalog = Catalog.default()
print(f"stock catalog: {len(catalog)} types")
print("a few entries:", ", ".join(t.type_id for t in list(catalog)[:6]), "...")

# An empty 48x48 assembly plate, 16 layers tall.
plate = WorkspaceState.empty(ASSEMBLY, (48, 48, 16), catalog)

# Press a red 2x4 at the origin and a rotated blue 2x4 next to it.
plate = place(plate, BrickPlacement(1, "2x4_red", 0, 0, 1, 0))
plate = place(plate, BrickPlacement(2, "2x4_blue", 4, 0, 1, 90))
print(f"\nafter two placements: {len(plate.cells)} occupied cells")

# Overlapping placements are refused, naming the first conflicting cell.
try:
    place(plate, BrickPlacement(3, "2x2_green", 1, 1, 1, 0))
except CellOccupiedError as exc:
    print(f"collision refused: {exc}")

# Removal restores the previous state exactly (value semantics).
grown = place(plate, BrickPlacement(3, "2x2_green", 10, 10, 1, 0))
assert remove(grown, 3) == plate
print("place followed by remove gives back the identical state")

# States serialize to a line-oriented structure file.
print("\nstructure file:")
print(dump_structure(plate))
