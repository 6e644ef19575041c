"""Structural checks: collision, support, and connectivity to the plate.

A structure is buildable when every brick rests on the plate or on studs
below it, and every brick is connected (through stud overlaps) to the
plate. These checks apply to final structures and to every intermediate
state of a build.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .world import BrickPlacement, WorkspaceState, footprint_cells

UNSUPPORTED = "UNSUPPORTED"
COLLISION = "COLLISION"
DISCONNECTED = "DISCONNECTED"
OUT_OF_BOUNDS = "OUT_OF_BOUNDS"

# Node representing the baseplate in the connection graph.
PLATE = "plate"


@dataclass(frozen=True)
class FeasibilityViolation:
    code: str
    instance_id: int | None
    detail: str


@dataclass(frozen=True)
class FeasibilityVerdict:
    ok: bool
    violations: tuple[FeasibilityViolation, ...]

    @classmethod
    def passed(cls) -> FeasibilityVerdict:
        return cls(True, ())

    @classmethod
    def from_violations(cls, violations: list[FeasibilityViolation]) -> FeasibilityVerdict:
        return cls(not violations, tuple(violations))

    def codes(self) -> tuple[str, ...]:
        return tuple(v.code for v in self.violations)


def support_overlap(state: WorkspaceState, instance_id: int) -> int:
    """Number of footprint cells with an occupied cell directly below."""
    p = state.placement(instance_id)
    return sum(
        1 for (x, y, z) in footprint_cells(p, state.catalog) if (x, y, z - 1) in state.cells
    )


def is_supported(state: WorkspaceState, instance_id: int, min_overlap: int = 1) -> bool:
    """True when the brick sits on the plate or on at least ``min_overlap`` studs."""
    p = state.placement(instance_id)
    if p.z == 1:
        return True
    return support_overlap(state, instance_id) >= min_overlap


def connection_graph(state: WorkspaceState) -> dict[object, frozenset]:
    """Symmetric adjacency over the plate node and all instance ids.

    Two bricks connect when their footprints overlap in (x, y) and they
    sit on adjacent layers; every z=1 brick connects to the plate.
    """
    adjacency: dict[object, set] = {PLATE: set()}
    for instance_id in state.placements:
        adjacency[instance_id] = set()
    for instance_id, p in state.placements.items():
        for (x, y, z) in footprint_cells(p, state.catalog):
            if z == 1:
                adjacency[instance_id].add(PLATE)
                adjacency[PLATE].add(instance_id)
            for neighbour_z in (z - 1, z + 1):
                other = state.cells.get((x, y, neighbour_z))
                if other is not None and other != instance_id:
                    adjacency[instance_id].add(other)
                    adjacency[other].add(instance_id)
    return {node: frozenset(edges) for node, edges in adjacency.items()}


def connected_to_plate(state: WorkspaceState) -> set[int]:
    """Instance ids reachable from the plate node by flood fill."""
    graph = connection_graph(state)
    seen: set = {PLATE}
    queue = deque([PLATE])
    while queue:
        node = queue.popleft()
        for neighbour in graph[node]:
            if neighbour not in seen:
                seen.add(neighbour)
                queue.append(neighbour)
    seen.discard(PLATE)
    return seen  # type: ignore[return-value]


def check_structure(state: WorkspaceState, min_overlap: int = 1) -> FeasibilityVerdict:
    """Verdict on a whole structure: support, connectivity, and a collision re-audit."""
    violations: list[FeasibilityViolation] = []
    # Collision freedom is a representation invariant of WorkspaceState;
    # re-audit here so hand-built states cannot sneak through.
    claimed: dict[tuple[int, int, int], int] = {}
    for instance_id in sorted(state.placements):
        p = state.placements[instance_id]
        for c in footprint_cells(p, state.catalog):
            if c in claimed:
                violations.append(
                    FeasibilityViolation(
                        COLLISION,
                        instance_id,
                        f"cell {c} shared with instance {claimed[c]}",
                    )
                )
            else:
                claimed[c] = instance_id
    for instance_id in sorted(state.placements):
        if not is_supported(state, instance_id, min_overlap):
            z = state.placements[instance_id].z
            violations.append(
                FeasibilityViolation(
                    UNSUPPORTED, instance_id, f"no support under layer {z} brick"
                )
            )
    reachable = connected_to_plate(state)
    for instance_id in sorted(state.placements):
        if instance_id not in reachable:
            violations.append(
                FeasibilityViolation(
                    DISCONNECTED, instance_id, "no stud path down to the plate"
                )
            )
    return FeasibilityVerdict.from_violations(violations)


def check_step(
    state: WorkspaceState, p: BrickPlacement, min_overlap: int = 1
) -> FeasibilityVerdict:
    """Verdict on adding one brick: bounds, collision, and support in state+p."""
    violations: list[FeasibilityViolation] = []
    bt = state.catalog[p.type_id]
    fw, fl = bt.footprint(p.rot)
    w, l, h = state.dims
    if p.x + fw > w or p.y + fl > l or p.z > h:
        violations.append(
            FeasibilityViolation(
                OUT_OF_BOUNDS,
                p.instance_id,
                f"{p.type_id} at ({p.x}, {p.y}, {p.z}, rot {p.rot}) exceeds {w}x{l}x{h} plate",
            )
        )
        return FeasibilityVerdict.from_violations(violations)
    cells = footprint_cells(p, state.catalog)
    for c in cells:
        blocking = state.cells.get(c)
        if blocking is not None:
            violations.append(
                FeasibilityViolation(
                    COLLISION, p.instance_id, f"cell {c} occupied by instance {blocking}"
                )
            )
            break
    if p.z > 1:
        overlap = sum(1 for (x, y, z) in cells if (x, y, z - 1) in state.cells)
        if overlap < min_overlap:
            violations.append(
                FeasibilityViolation(
                    UNSUPPORTED,
                    p.instance_id,
                    f"only {overlap} studs under a layer {p.z} brick (need {min_overlap})",
                )
            )
    return FeasibilityVerdict.from_violations(violations)
