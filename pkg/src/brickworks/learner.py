"""Turn keyframe pairs into task nodes: one brick leaves storage, one appears in assembly.

Each consecutive keyframe pair must be explainable as a single brick move.
The assembly-side change must be one solid rectangle of uniform color at a
uniform new height; the storage-side change must be a matching rectangle
that got one layer shorter. Anything else fails loudly rather than guess.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import world
from .errors import (
    CellOccupiedError,
    DemonstrationError,
    EmptyStreamError,
    InconsistentColorError,
    InitialAssemblyNotEmptyError,
    MultiBrickChangeError,
    NoChangeError,
    OutOfBoundsError,
    UnknownFootprintError,
)
from .perception import SceneObservation, top_surface
from .taskgraph import ASSEMBLY_DIR, Pose, TaskGraph, TaskNode
from .world import ASSEMBLY, PALETTE, BrickPlacement, Catalog, WorkspaceState

DEFAULT_PLATE_HEIGHT = 16


@dataclass(frozen=True)
class StepDiff:
    """One inferred brick move between two keyframes."""

    removed_region: frozenset[tuple[int, int]]
    added_region: frozenset[tuple[int, int]]
    brick_type: str
    storage_pose: Pose
    assembly_pose: Pose


@dataclass(frozen=True)
class _Region:
    cells: frozenset[tuple[int, int]]
    x: int
    y: int
    x_extent: int
    y_extent: int


def _rectangle(changed: np.ndarray, what: str) -> _Region:
    """The changed cells as a solid axis-aligned rectangle, or raise."""
    xs, ys = np.nonzero(changed)
    x0, x1 = int(xs.min()), int(xs.max())
    y0, y1 = int(ys.min()), int(ys.max())
    cells = frozenset((int(x), int(y)) for x, y in zip(xs, ys))
    if len(cells) != (x1 - x0 + 1) * (y1 - y0 + 1):
        raise MultiBrickChangeError(f"{what} region is not a solid rectangle")
    return _Region(cells, x0, y0, x1 - x0 + 1, y1 - y0 + 1)


def _uniform(values: np.ndarray, region: _Region, what: str) -> int:
    unique = np.unique(values[region.x : region.x + region.x_extent,
                              region.y : region.y + region.y_extent])
    if unique.size != 1:
        raise MultiBrickChangeError(f"{what} is not uniform over the changed region")
    return int(unique[0])


def _orientation(region: _Region, width: int, length: int) -> int:
    if width == length:
        return 0
    return 0 if (region.x_extent, region.y_extent) == (width, length) else 90


def diff_keyframes(
    prev: SceneObservation, next_: SceneObservation, catalog: Catalog
) -> StepDiff:
    """Explain two consecutive keyframes as exactly one brick move."""
    a_prev, a_next = prev.assembly, next_.assembly
    s_prev, s_next = prev.storage, next_.storage
    for before, after in ((a_prev, a_next), (s_prev, s_next)):
        if before.heights.shape != after.heights.shape:
            raise MultiBrickChangeError("keyframes have mismatched plate dims")

    a_up = a_next.heights > a_prev.heights
    a_down = a_next.heights < a_prev.heights
    s_down = s_next.heights < s_prev.heights
    s_up = s_next.heights > s_prev.heights
    a_recolored = (a_next.heights == a_prev.heights) & (a_next.colors != a_prev.colors)
    s_recolored = (s_next.heights == s_prev.heights) & (s_next.colors != s_prev.colors)

    if not (a_up.any() or a_down.any() or s_down.any() or s_up.any()
            or a_recolored.any() or s_recolored.any()):
        raise NoChangeError("keyframes are identical")
    if a_down.any() or s_up.any():
        raise MultiBrickChangeError(
            "assembly lost material or storage gained material; not a forward move"
        )
    if a_recolored.any() or s_recolored.any():
        raise MultiBrickChangeError("color changed where no brick was added")
    if not a_up.any() or not s_down.any():
        raise MultiBrickChangeError(
            "change touches only one workspace; a move needs a source and a target"
        )

    added = _rectangle(a_up, "assembly")
    removed = _rectangle(s_down, "storage")

    z = _uniform(a_next.heights, added, "assembly height")
    color_index = _uniform(a_next.colors, added, "assembly color")
    if color_index < 0:
        raise InconsistentColorError("added region classified as background")
    color_name = PALETTE[color_index][0]

    storage_z = _uniform(s_prev.heights, removed, "storage height")
    storage_left = _uniform(s_next.heights, removed, "storage height after pick")
    if storage_left != storage_z - 1:
        raise MultiBrickChangeError(
            f"storage height dropped from {storage_z} to {storage_left}, not by one brick"
        )
    storage_color = _uniform(s_prev.colors, removed, "storage color")
    if storage_color != color_index:
        raise InconsistentColorError(
            f"storage lost {PALETTE[storage_color][0] if storage_color >= 0 else 'background'} "
            f"but assembly gained {color_name}"
        )

    footprint = tuple(sorted((added.x_extent, added.y_extent)))
    if tuple(sorted((removed.x_extent, removed.y_extent))) != footprint:
        raise MultiBrickChangeError(
            "storage and assembly changes have different footprints"
        )
    candidates = [
        t for t in catalog
        if (t.width, t.length) == footprint and t.color == color_name
    ]
    if not candidates:
        raise UnknownFootprintError(
            f"no catalog type is a {footprint[0]}x{footprint[1]} {color_name} brick"
        )
    brick_type = min(candidates, key=lambda t: t.type_id)

    return StepDiff(
        removed_region=removed.cells,
        added_region=added.cells,
        brick_type=brick_type.type_id,
        storage_pose=Pose(
            removed.x, removed.y, storage_z,
            _orientation(removed, brick_type.width, brick_type.length),
        ),
        assembly_pose=Pose(
            added.x, added.y, z,
            _orientation(added, brick_type.width, brick_type.length),
        ),
    )


def learn(
    keyframes: list[SceneObservation],
    catalog: Catalog,
    plate_height: int = DEFAULT_PLATE_HEIGHT,
) -> TaskGraph:
    """Fold keyframe diffs into an assembly task graph.

    A full assembly state is reconstructed as the fold advances, so
    bricks that later disappear under others stay accounted for. Pairs
    with no change contribute no node; anything unexplainable raises
    with the keyframe index.
    """
    if not keyframes:
        raise EmptyStreamError("a demonstration needs at least one keyframe")
    first = keyframes[0]
    if first.assembly.heights.any():
        raise InitialAssemblyNotEmptyError(
            "assembly plate is not empty at the first keyframe"
        )
    w, l = first.assembly.dims_wl
    state = WorkspaceState.empty(ASSEMBLY, (w, l, plate_height), catalog)
    nodes: list[TaskNode] = []
    for index in range(1, len(keyframes)):
        try:
            diff = diff_keyframes(keyframes[index - 1], keyframes[index], catalog)
        except NoChangeError:
            continue
        except DemonstrationError as exc:
            raise type(exc)(str(exc), keyframe_index=index) from exc
        pose = diff.assembly_pose
        placement = BrickPlacement(
            len(nodes) + 1, diff.brick_type, pose.x, pose.y, pose.z, pose.rot
        )
        try:
            state = world.place(state, placement)
        except (CellOccupiedError, OutOfBoundsError) as exc:
            raise MultiBrickChangeError(
                f"inferred move conflicts with the reconstructed state: {exc}",
                keyframe_index=index,
            ) from exc
        heights, colors = top_surface(state)
        observed = keyframes[index].assembly
        if not (np.array_equal(heights, observed.heights)
                and np.array_equal(colors, observed.colors)):
            raise MultiBrickChangeError(
                "observation not fully explained by a single brick move",
                keyframe_index=index,
            )
        nodes.append(TaskNode(len(nodes), diff.brick_type, diff.storage_pose, pose))
    return TaskGraph(ASSEMBLY_DIR, tuple(nodes))
