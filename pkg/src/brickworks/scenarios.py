"""Ready-made fixtures: canonical constraint scenarios and a default desk setup.

These are used by the test suite, the demo scripts, and as the default
session layout for the CLI and the service.
"""

from __future__ import annotations

from . import world
from .taskgraph import ASSEMBLY_DIR, Pose, TaskGraph, TaskNode
from .world import (
    ASSEMBLY,
    DEFAULT_DIMS,
    STORAGE,
    BrickPlacement,
    Catalog,
    Dims,
    WorkspaceState,
)


def _build(workspace_id: str, dims: Dims, catalog: Catalog, specs) -> WorkspaceState:
    state = WorkspaceState.empty(workspace_id, dims, catalog)
    for i, (type_id, x, y, z, rot) in enumerate(specs, start=1):
        state = world.place(state, BrickPlacement(i, type_id, x, y, z, rot))
    return state


def unsupported_bridge_states(
    dims: Dims = (8, 8, 4), catalog: Catalog | None = None
) -> tuple[WorkspaceState, WorkspaceState]:
    """Two piers and a bridge: the short middle brick floats, the long one spans.

    Returns (bad, good): the bad structure has a red 1x2 bridging nothing
    between the piers; the good one replaces it with a 1x6 resting on both.
    """
    catalog = catalog if catalog is not None else Catalog.default()
    piers = [("1x2_blue", 0, 0, 1, 90), ("1x2_blue", 4, 0, 1, 90)]
    bad = _build(ASSEMBLY, dims, catalog, piers + [("1x2_red", 2, 0, 2, 90)])
    good = _build(ASSEMBLY, dims, catalog, piers + [("1x6_red", 0, 0, 2, 90)])
    return bad, good


def tight_gap_target(
    dims: Dims = (16, 16, 8), catalog: Catalog | None = None
) -> WorkspaceState:
    """Two three-layer towers with a single-stud slot between them."""
    catalog = catalog if catalog is not None else Catalog.default()
    specs = [("1x1_blue", x, 5, z, 0) for x in (4, 6) for z in (1, 2, 3)]
    specs.append(("1x1_red", 5, 5, 1, 0))
    return _build(ASSEMBLY, dims, catalog, specs)


def tight_gap_storage(
    dims: Dims = (16, 16, 8), catalog: Catalog | None = None
) -> WorkspaceState:
    """Storage layout holding the seven tower-and-slot bricks, spread flat."""
    catalog = catalog if catalog is not None else Catalog.default()
    specs = [("1x1_blue", 2 * i, 0, 1, 0) for i in range(6)]
    specs.append(("1x1_red", 12, 0, 1, 0))
    return _build(STORAGE, dims, catalog, specs)


def _tower_nodes(order: list[tuple[str, int, int, int]]) -> tuple[TaskNode, ...]:
    storage = tight_gap_storage()
    taken: set[int] = set()
    nodes = []
    for i, (type_id, x, y, z) in enumerate(order):
        source = next(
            p
            for iid, p in sorted(storage.placements.items())
            if p.type_id == type_id and iid not in taken
        )
        taken.add(source.instance_id)
        nodes.append(
            TaskNode(
                i,
                type_id,
                Pose(source.x, source.y, source.z, source.rot),
                Pose(x, y, z, 0),
            )
        )
    return tuple(nodes)


def tight_gap_middle_last() -> TaskGraph:
    """Build both towers first, then try to press the slot brick: too tight."""
    order = [("1x1_blue", x, 5, z) for z in (1, 2, 3) for x in (4, 6)]
    order.append(("1x1_red", 5, 5, 1))
    return TaskGraph(ASSEMBLY_DIR, _tower_nodes(order))


def tight_gap_middle_first() -> TaskGraph:
    """Press the slot brick first, then raise the towers around it."""
    order = [("1x1_red", 5, 5, 1)]
    order += [("1x1_blue", x, 5, z) for z in (1, 2, 3) for x in (4, 6)]
    return TaskGraph(ASSEMBLY_DIR, _tower_nodes(order))


def desk_scenario(
    catalog: Catalog | None = None, dims: Dims = DEFAULT_DIMS
) -> WorkspaceState:
    """Default storage plate: a modest assortment parked along the rows."""
    catalog = catalog if catalog is not None else Catalog.default()
    specs = [
        ("2x4_red", 2, 2, 1, 0),
        ("2x4_red", 2, 8, 1, 0),
        ("2x4_blue", 2, 14, 1, 0),
        ("2x4_yellow", 2, 20, 1, 0),
        ("2x2_blue", 8, 2, 1, 0),
        ("2x2_blue", 8, 6, 1, 0),
        ("2x2_green", 8, 10, 1, 0),
        ("2x2_green", 8, 14, 1, 0),
        ("1x6_white", 14, 2, 1, 0),
        ("1x6_white", 17, 2, 1, 0),
        ("1x4_gray", 14, 10, 1, 0),
        ("1x4_gray", 17, 10, 1, 0),
        ("1x2_orange", 14, 16, 1, 0),
        ("1x2_orange", 17, 16, 1, 0),
        ("1x1_purple", 14, 20, 1, 0),
        ("1x1_purple", 17, 20, 1, 0),
    ]
    return _build(STORAGE, dims, catalog, specs)
