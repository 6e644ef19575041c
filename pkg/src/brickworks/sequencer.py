"""Search for a buildable order: pruned DFS planner and an exhaustive oracle.

The planner finds an assembly order for a target structure such that every
step passes the structural, clearance, and reach checks the twin applies.
The exhaustive enumerator filters raw permutations with the same per-step
checks; it exists to certify the planner on small instances and as the
ground truth for order-existence questions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import world
from .errors import (
    BudgetExceededError,
    InfeasibleTargetError,
    OutOfBoundsError,
    TooLargeError,
)
from .feasibility import check_step, check_structure
from .manipulation import ToolProfile, assembly_operable
from .taskgraph import ASSEMBLY_DIR, Pose, TaskGraph, TaskNode
from .twin import ReachEnvelope
from .world import (
    ASSEMBLY,
    STORAGE,
    BrickPlacement,
    WorkspaceState,
    footprint_cells,
)

DEFAULT_MAX_BRICKS = 12
DEFAULT_NODE_BUDGET = 500_000
EXHAUSTIVE_MAX_BRICKS = 6


@dataclass(frozen=True)
class SequencingProblem:
    """A target structure, the storage it must be built from, and the robot model."""

    target: WorkspaceState
    storage: WorkspaceState
    tool: ToolProfile = field(default_factory=ToolProfile)
    reach: ReachEnvelope | None = None

    def envelope(self) -> ReachEnvelope:
        if self.reach is not None:
            return self.reach
        sw, sl, _ = self.storage.dims
        aw, al, _ = self.target.dims
        return ReachEnvelope((0, 0, sw, sl), (0, 0, aw, al))


def auto_storage_for(
    target: WorkspaceState, dims: tuple[int, int, int] | None = None
) -> WorkspaceState:
    """A flat storage layout holding exactly the target's bricks.

    Bricks are parked row by row with a one-stud gap, in canonical target
    order, so the layout is deterministic for a given target.
    """
    dims = dims if dims is not None else target.dims
    storage = WorkspaceState.empty(STORAGE, dims, target.catalog)
    x = y = 0
    row_depth = 0
    for p in sorted(target.placements.values(), key=lambda p: (p.z, p.x, p.y, p.type_id)):
        bt = target.catalog[p.type_id]
        if x + bt.width > dims[0]:
            x = 0
            y += row_depth + 1
            row_depth = 0
        if y + bt.length > dims[1]:
            raise OutOfBoundsError(
                f"storage plate {dims[0]}x{dims[1]} cannot park all target bricks"
            )
        storage = world.place(
            storage,
            BrickPlacement(storage.next_instance_id(), p.type_id, x, y, 1, 0),
        )
        x += bt.width + 1
        row_depth = max(row_depth, bt.length)
    return storage


def _ordered_targets(problem: SequencingProblem) -> list[BrickPlacement]:
    """Target bricks in the deterministic tie-break order (z, x, y)."""
    return sorted(
        problem.target.placements.values(),
        key=lambda p: (p.z, p.x, p.y, p.rot, p.type_id),
    )


def _take_storage(storage: WorkspaceState, type_id: str) -> int | None:
    """Lexicographically earliest free storage brick of the type."""
    best = None
    for instance_id, p in storage.placements.items():
        if p.type_id != type_id:
            continue
        key = (p.z, p.x, p.y, instance_id)
        if best is None or key < best[0]:
            best = (key, instance_id)
    return None if best is None else best[1]


def _pose_reachable(
    placement: BrickPlacement,
    workspace_id: str,
    problem: SequencingProblem,
) -> bool:
    reach = problem.envelope()
    x0, y0, x1, y1 = reach.rect_for(workspace_id)
    for (cx, cy, _) in footprint_cells(placement, problem.target.catalog):
        if not (x0 <= cx < x1 and y0 <= cy < y1):
            return False
    return placement.z + problem.tool.tool_length <= reach.max_reach_height


def _try_step(
    assembly: WorkspaceState,
    storage: WorkspaceState,
    target: BrickPlacement,
    problem: SequencingProblem,
) -> tuple[WorkspaceState, WorkspaceState, TaskNode] | None:
    """Apply one target brick if the step passes every twin check."""
    source_id = _take_storage(storage, target.type_id)
    if source_id is None:
        return None
    source = storage.placements[source_id]
    placement = BrickPlacement(
        assembly.next_instance_id(), target.type_id, target.x, target.y, target.z, target.rot
    )
    if not check_step(assembly, placement).ok:
        return None
    if not assembly_operable(assembly, placement, problem.tool).ok:
        return None
    if not _pose_reachable(source, STORAGE, problem):
        return None
    if not _pose_reachable(placement, ASSEMBLY, problem):
        return None
    node = TaskNode(
        0,  # renumbered by the caller
        target.type_id,
        Pose(source.x, source.y, source.z, source.rot),
        Pose(target.x, target.y, target.z, target.rot),
    )
    return world.place(assembly, placement), world.remove(storage, source_id), node


def _renumbered(nodes: list[TaskNode]) -> TaskGraph:
    return TaskGraph(
        ASSEMBLY_DIR,
        tuple(
            TaskNode(i, n.brick_type, n.storage_pose, n.assembly_pose)
            for i, n in enumerate(nodes)
        ),
    )


def find_order(
    problem: SequencingProblem,
    limit: int = DEFAULT_NODE_BUDGET,
    max_bricks: int = DEFAULT_MAX_BRICKS,
) -> TaskGraph | None:
    """Depth-first search for a fully operable assembly order.

    Candidates are expanded in (z, x, y) order, which both prunes (a brick
    is never tried before anything could support it) and makes the result
    deterministic. Returns None when the search space is exhausted.
    """
    targets = _ordered_targets(problem)
    if len(targets) > max_bricks:
        raise TooLargeError(
            f"{len(targets)} bricks exceed the planner cap of {max_bricks}"
        )
    structure = check_structure(problem.target)
    if not structure.ok:
        raise InfeasibleTargetError(
            "; ".join(f"{v.code} instance {v.instance_id}" for v in structure.violations)
        )
    assembly0 = WorkspaceState.empty(ASSEMBLY, problem.target.dims, problem.target.catalog)
    expansions = 0
    # States are determined by the set of placed bricks, so failed sets
    # never need a second visit regardless of order.
    dead_ends: set[frozenset[int]] = set()

    def dfs(
        assembly: WorkspaceState,
        storage: WorkspaceState,
        placed: frozenset[int],
        nodes: list[TaskNode],
    ) -> TaskGraph | None:
        nonlocal expansions
        if len(placed) == len(targets):
            return _renumbered(nodes)
        if placed in dead_ends:
            return None
        for i, target in enumerate(targets):
            if i in placed:
                continue
            expansions += 1
            if expansions > limit:
                raise BudgetExceededError(f"exceeded {limit} search expansions")
            outcome = _try_step(assembly, storage, target, problem)
            if outcome is None:
                continue
            next_assembly, next_storage, node = outcome
            result = dfs(next_assembly, next_storage, placed | {i}, nodes + [node])
            if result is not None:
                return result
        dead_ends.add(placed)
        return None

    return dfs(assembly0, problem.storage, frozenset(), [])


def exhaustive_orders(problem: SequencingProblem) -> list[TaskGraph]:
    """Every brick permutation that passes all per-step checks.

    Brute force over raw permutations; only usable on small instances, and
    deliberately free of the planner's pruning so it can certify it.
    """
    targets = _ordered_targets(problem)
    if len(targets) > EXHAUSTIVE_MAX_BRICKS:
        raise TooLargeError(
            f"{len(targets)} bricks exceed the exhaustive cap of {EXHAUSTIVE_MAX_BRICKS}"
        )
    assembly0 = WorkspaceState.empty(ASSEMBLY, problem.target.dims, problem.target.catalog)
    valid: list[TaskGraph] = []
    for order in itertools.permutations(range(len(targets))):
        assembly, storage = assembly0, problem.storage
        nodes: list[TaskNode] = []
        for i in order:
            outcome = _try_step(assembly, storage, targets[i], problem)
            if outcome is None:
                break
            assembly, storage, node = outcome
            nodes.append(node)
        else:
            valid.append(_renumbered(nodes))
    return valid
