"""Tool clearance model for press-from-above assembly and attach-and-twist removal.

The end-of-arm tool is reduced to clearance boxes: a lateral margin of
``margin`` studs around the brick and a body ``body_height`` layers tall
above it. Pressing a brick needs the dilated volume above it free;
twisting one off additionally needs a free flank to attach the lever.
Volumes are clipped to the grid; space beyond the plate or above the
build volume is unobstructed.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import world
from .errors import InvalidSideError
from .feasibility import check_structure
from .world import BrickPlacement, Catalog, Cell, Dims, WorkspaceState, footprint_cells

NO_TOP_CLEARANCE = "NO_TOP_CLEARANCE"
NO_SIDE_ACCESS = "NO_SIDE_ACCESS"
BRICK_ON_TOP = "BRICK_ON_TOP"
BREAKS_STRUCTURE = "BREAKS_STRUCTURE"

SIDES = ("+x", "-x", "+y", "-y")


@dataclass(frozen=True)
class ToolProfile:
    """Clearance parameters of the attach-and-twist tool.

    ``tool_length`` is the adjustable shaft between flange and tip; it
    only enters reachability height checks, not clearance volumes.
    """

    margin: int = 1
    body_height: int = 4
    tool_length: int = 8

    def __post_init__(self) -> None:
        if self.margin < 0:
            raise ValueError("margin must be >= 0")
        if self.body_height < 1:
            raise ValueError("body height must be >= 1")
        if self.tool_length < 0:
            raise ValueError("tool length must be >= 0")


@dataclass(frozen=True)
class OperabilityViolation:
    code: str
    cells: tuple[Cell, ...]
    detail: str


@dataclass(frozen=True)
class OperabilityVerdict:
    ok: bool
    violations: tuple[OperabilityViolation, ...]

    @classmethod
    def passed(cls) -> OperabilityVerdict:
        return cls(True, ())

    @classmethod
    def from_violations(cls, violations: list[OperabilityViolation]) -> OperabilityVerdict:
        return cls(not violations, tuple(violations))

    def codes(self) -> tuple[str, ...]:
        return tuple(v.code for v in self.violations)


def _extent(p: BrickPlacement, catalog: Catalog) -> tuple[int, int, int, int]:
    fw, fl = catalog[p.type_id].footprint(p.rot)
    return p.x, p.y, fw, fl


def _clip(cells: list[Cell], dims: Dims) -> tuple[Cell, ...]:
    w, l, h = dims
    return tuple(
        (x, y, z) for (x, y, z) in cells if 0 <= x < w and 0 <= y < l and 1 <= z <= h
    )


def dilated_top_volume(
    p: BrickPlacement, catalog: Catalog, tool: ToolProfile, dims: Dims
) -> tuple[Cell, ...]:
    """Cells the tool body sweeps above the brick: footprint dilated by the
    margin, layers z+1 .. z+body_height, clipped to the grid."""
    x, y, fw, fl = _extent(p, catalog)
    m = tool.margin
    cells = [
        (cx, cy, cz)
        for cx in range(x - m, x + fw + m)
        for cy in range(y - m, y + fl + m)
        for cz in range(p.z + 1, p.z + tool.body_height + 1)
    ]
    return _clip(cells, dims)


def side_strip(
    p: BrickPlacement, side: str, catalog: Catalog, tool: ToolProfile, dims: Dims
) -> tuple[Cell, ...]:
    """The margin-wide strip beside one flank, layers z .. z+body_height."""
    if side not in SIDES:
        raise InvalidSideError(f"side must be one of {SIDES}, got {side!r}")
    x, y, fw, fl = _extent(p, catalog)
    m = tool.margin
    if side == "+x":
        xs, ys = range(x + fw, x + fw + m), range(y, y + fl)
    elif side == "-x":
        xs, ys = range(x - m, x), range(y, y + fl)
    elif side == "+y":
        xs, ys = range(x, x + fw), range(y + fl, y + fl + m)
    else:
        xs, ys = range(x, x + fw), range(y - m, y)
    cells = [
        (cx, cy, cz)
        for cx in xs
        for cy in ys
        for cz in range(p.z, p.z + tool.body_height + 1)
    ]
    return _clip(cells, dims)


def _occupied(state: WorkspaceState, cells: tuple[Cell, ...]) -> tuple[Cell, ...]:
    return tuple(c for c in cells if c in state.cells)


def assembly_operable(
    state: WorkspaceState, p: BrickPlacement, tool: ToolProfile
) -> OperabilityVerdict:
    """Can the tool press this brick down here?

    The press target (the brick's own cells) and the tool body descending
    around and above it must be empty. The body occupies the dilated
    footprint only above the placed brick, so neighbours at the same
    layer never block a press.
    """
    violations: list[OperabilityViolation] = []
    target = footprint_cells(p, state.catalog)
    blocked = list(_occupied(state, target))
    blocked += list(_occupied(state, dilated_top_volume(p, state.catalog, tool, state.dims)))
    if blocked:
        violations.append(
            OperabilityViolation(
                NO_TOP_CLEARANCE,
                tuple(sorted(set(blocked))),
                f"{len(set(blocked))} cells block the press volume",
            )
        )
    return OperabilityVerdict.from_violations(violations)


def removable(
    state: WorkspaceState, instance_id: int, tool: ToolProfile
) -> OperabilityVerdict:
    """Can this brick be twisted off without wrecking the rest?

    Four clauses: nothing stacked on the brick, the remaining structure
    stays valid after removal, the tool body fits above, and at least
    one flank is free for the lever.
    """
    p = state.placement(instance_id)
    violations: list[OperabilityViolation] = []

    on_top = tuple(
        (x, y, z + 1)
        for (x, y, z) in footprint_cells(p, state.catalog)
        if (x, y, z + 1) in state.cells
    )
    if on_top:
        violations.append(
            OperabilityViolation(
                BRICK_ON_TOP, on_top, "pulling would drag the stacked bricks along"
            )
        )

    remainder = world.remove(state, instance_id)
    after = check_structure(remainder)
    if not after.ok:
        hit_cells = []
        for v in after.violations:
            if v.instance_id is not None and v.instance_id in remainder.placements:
                hit_cells.extend(footprint_cells(remainder.placements[v.instance_id], state.catalog))
        violations.append(
            OperabilityViolation(
                BREAKS_STRUCTURE,
                tuple(sorted(set(hit_cells))),
                "; ".join(f"{v.code} instance {v.instance_id}" for v in after.violations),
            )
        )

    top_blocked = _occupied(state, dilated_top_volume(p, state.catalog, tool, state.dims))
    if top_blocked:
        violations.append(
            OperabilityViolation(
                NO_TOP_CLEARANCE,
                tuple(sorted(set(top_blocked))),
                f"{len(set(top_blocked))} cells block the tool body",
            )
        )

    strip_blockers: list[Cell] = []
    free_side = None
    for side in SIDES:
        blocked = _occupied(state, side_strip(p, side, state.catalog, tool, state.dims))
        if not blocked:
            free_side = side
            break
        strip_blockers.extend(blocked)
    if free_side is None:
        violations.append(
            OperabilityViolation(
                NO_SIDE_ACCESS,
                tuple(sorted(set(strip_blockers))),
                "all four flanks are blocked for the twist lever",
            )
        )
    return OperabilityVerdict.from_violations(violations)


def free_side(
    state: WorkspaceState, instance_id: int, tool: ToolProfile
) -> str | None:
    """First free flank in +x, -x, +y, -y order, or None."""
    p = state.placement(instance_id)
    for side in SIDES:
        if not _occupied(state, side_strip(p, side, state.catalog, tool, state.dims)):
            return side
    return None


def disassembly_motion(
    p: BrickPlacement, side: str, catalog: Catalog, tool: ToolProfile, dims: Dims
) -> tuple[tuple[Cell, ...], tuple[Cell, ...]]:
    """Clearance volumes of the attach-then-twist motion for one flank.

    Returns (attach, sweep): the flank strip the lever attaches through,
    then the full twist sweep (strip plus the dilated volume above the
    brick). Both exclude the brick's own cells.
    """
    strip = side_strip(p, side, catalog, tool, dims)
    top = dilated_top_volume(p, catalog, tool, dims)
    sweep = tuple(sorted(set(strip) | set(top)))
    return tuple(sorted(strip)), sweep
