"""Synthetic demonstrations: frame streams for scripted builds, random scripts.

The generator plays a task graph like a human demonstrator would look to
the camera: a stable burst of paired frames per keyframe period, optional
hand-occluded junk frames between periods, and optional per-pixel sensor
noise on every frame.
"""

from __future__ import annotations

import random

import numpy as np

from . import world
from .errors import CellOccupiedError, OutOfBoundsError, StorageMismatchError
from .feasibility import check_step
from .manipulation import ToolProfile, assembly_operable
from .perception import DEFAULT_RESOLUTION, DEFAULT_STABILITY_WINDOW, Snapshot, render
from .taskgraph import ASSEMBLY_DIR, Pose, TaskGraph, TaskNode
from .world import (
    ASSEMBLY,
    STORAGE,
    BrickPlacement,
    Catalog,
    Dims,
    WorkspaceState,
)

FRAME_INTERVAL_MS = 100


def find_instance_at(state: WorkspaceState, pose: Pose, type_id: str) -> int | None:
    """Instance anchored at the pose with the same type and footprint."""
    for instance_id, p in sorted(state.placements.items()):
        if (
            p.type_id == type_id
            and (p.x, p.y, p.z) == (pose.x, pose.y, pose.z)
            and p.rot % 180 == pose.rot % 180
        ):
            return instance_id
    return None


def _noise(snapshot: Snapshot, rng: np.random.Generator, fraction: float, max_height: float) -> Snapshot:
    """Corrupt up to ``fraction`` of each cell's pixels with random junk."""
    r = snapshot.resolution
    per_cell = int(r * r * fraction)
    if per_cell == 0:
        return snapshot
    heights = snapshot.heights.copy()
    colors = snapshot.colors.copy()
    pw, pl = heights.shape
    w, l = pw // r, pl // r
    n_cells = w * l
    offsets = rng.integers(0, r, size=(n_cells, per_cell, 2))
    junk_h = rng.uniform(0.0, max_height, size=(n_cells, per_cell))
    junk_c = rng.integers(0, 1 << 24, size=(n_cells, per_cell), dtype=np.uint32)
    idx = 0
    for cx in range(w):
        for cy in range(l):
            for s in range(per_cell):
                i = cx * r + int(offsets[idx, s, 0])
                j = cy * r + int(offsets[idx, s, 1])
                heights[i, j] = junk_h[idx, s]
                colors[i, j] = junk_c[idx, s]
            idx += 1
    return Snapshot(snapshot.timestamp, snapshot.workspace_id, heights, colors, r)


def _hand_blob(snapshot: Snapshot, rng: np.random.Generator) -> Snapshot:
    """A hand-sized occlusion at a random spot; different every call."""
    heights = snapshot.heights.copy()
    colors = snapshot.colors.copy()
    pw, pl = heights.shape
    span = max(2, min(pw, pl) // 3)
    x0 = int(rng.integers(0, max(1, pw - span)))
    y0 = int(rng.integers(0, max(1, pl - span)))
    heights[x0 : x0 + span, y0 : y0 + span] = float(rng.uniform(4.0, 9.0))
    colors[x0 : x0 + span, y0 : y0 + span] = int(rng.integers(0, 1 << 24))
    return Snapshot(snapshot.timestamp, snapshot.workspace_id, heights, colors, snapshot.resolution)


def render_script(
    graph: TaskGraph,
    storage: WorkspaceState,
    resolution: int = DEFAULT_RESOLUTION,
    stability_window: int = DEFAULT_STABILITY_WINDOW,
    junk_frames: int = 1,
    noise_fraction: float = 0.0,
    seed: int = 0,
) -> list[Snapshot]:
    """Play an assembly graph into a paired frame stream.

    Emits ``stability_window`` frame pairs per keyframe period, separated
    by ``junk_frames`` occluded pairs, so the stream exercises the same
    keyframe detection a live camera feed would.
    """
    if graph.direction != ASSEMBLY_DIR:
        raise ValueError("only assembly graphs can be rendered as demonstrations")
    rng = np.random.default_rng(seed)
    assembly = WorkspaceState.empty(ASSEMBLY, storage.dims, storage.catalog)
    max_height = float(storage.dims[2] / 2)
    frames: list[Snapshot] = []
    ts = 0

    def emit_period(storage_state: WorkspaceState, assembly_state: WorkspaceState) -> None:
        nonlocal ts
        for _ in range(stability_window):
            for state in (storage_state, assembly_state):
                frame = render(state, resolution=resolution, timestamp=ts)
                frames.append(_noise(frame, rng, noise_fraction, max_height))
            ts += FRAME_INTERVAL_MS

    def emit_junk(storage_state: WorkspaceState, assembly_state: WorkspaceState) -> None:
        nonlocal ts
        for _ in range(junk_frames):
            for state in (storage_state, assembly_state):
                frame = render(state, resolution=resolution, timestamp=ts)
                frames.append(_hand_blob(frame, rng))
            ts += FRAME_INTERVAL_MS

    emit_period(storage, assembly)
    for node in graph.nodes:
        instance_id = find_instance_at(storage, node.storage_pose, node.brick_type)
        if instance_id is None:
            raise StorageMismatchError(
                f"node {node.index}: no {node.brick_type} at storage pose "
                f"({node.storage_pose.x}, {node.storage_pose.y}, {node.storage_pose.z})"
            )
        emit_junk(storage, assembly)
        storage = world.remove(storage, instance_id)
        pose = node.assembly_pose
        assembly = world.place(
            assembly,
            BrickPlacement(node.index + 1, node.brick_type, pose.x, pose.y, pose.z, pose.rot),
        )
        emit_period(storage, assembly)
    return frames


def _normalized_rot(bt: world.BrickType, rng: random.Random) -> int:
    return 0 if bt.width == bt.length else rng.choice((0, 90))


def random_script(
    rng: random.Random,
    catalog: Catalog | None = None,
    dims: Dims = (16, 16, 8),
    n_bricks: int = 6,
    tool: ToolProfile | None = None,
    max_footprint: int = 4,
) -> tuple[TaskGraph, WorkspaceState]:
    """A random valid demonstration: storage layout plus an operable build.

    Every step passes the structural check and the tool clearance check,
    and all poses use normalized rotations, so the rendered demonstration
    is recoverable field-exactly by the learner.
    """
    catalog = catalog if catalog is not None else Catalog.default()
    tool = tool if tool is not None else ToolProfile()
    types = [t for t in catalog if t.length <= max_footprint]
    chosen = [rng.choice(types) for _ in range(n_bricks)]

    storage = WorkspaceState.empty(STORAGE, dims, catalog)
    for bt in chosen:
        for _ in range(400):
            rot = _normalized_rot(bt, rng)
            p = BrickPlacement(
                storage.next_instance_id(),
                bt.type_id,
                rng.randrange(dims[0]),
                rng.randrange(dims[1]),
                1,
                rot,
            )
            try:
                storage = world.place(storage, p)
                break
            except (OutOfBoundsError, CellOccupiedError):
                continue
        else:
            raise RuntimeError(f"could not fit {n_bricks} bricks on a {dims} storage plate")

    assembly = WorkspaceState.empty(ASSEMBLY, dims, catalog)
    nodes: list[TaskNode] = []
    order = sorted(storage.placements)
    rng.shuffle(order)
    working_storage = storage
    for instance_id in order:
        source = working_storage.placements[instance_id]
        bt = catalog[source.type_id]
        placement = None
        for _ in range(300):
            rot = _normalized_rot(bt, rng)
            fw, fl = bt.footprint(rot)
            x = rng.randrange(max(1, dims[0] - fw + 1))
            y = rng.randrange(max(1, dims[1] - fl + 1))
            top = max(
                (z for (cx, cy, z) in assembly.cells if x <= cx < x + fw and y <= cy < y + fl),
                default=0,
            )
            candidate = BrickPlacement(len(nodes) + 1, bt.type_id, x, y, top + 1, rot)
            if not check_step(assembly, candidate).ok:
                continue
            if not assembly_operable(assembly, candidate, tool).ok:
                continue
            placement = candidate
            break
        if placement is None:
            raise RuntimeError("could not find an operable placement; plate too crowded")
        assembly = world.place(assembly, placement)
        working_storage = world.remove(working_storage, instance_id)
        nodes.append(
            TaskNode(
                len(nodes),
                bt.type_id,
                Pose(source.x, source.y, source.z, source.rot),
                Pose(placement.x, placement.y, placement.z, placement.rot),
            )
        )
    return TaskGraph(ASSEMBLY_DIR, tuple(nodes)), storage
