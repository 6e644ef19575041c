"""Temporal task graphs: one brick move per node, reversal, validation, text format.

An assembly node means "take the brick from its storage pose and press it
at its assembly pose". Reversing the node order (and the direction flag)
yields the disassembly sequence: detach from the assembly pose, return to
the storage pose.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

from . import world
from .errors import CellOccupiedError, OutOfBoundsError, ParseError, UnknownTypeError
from .feasibility import (
    COLLISION,
    OUT_OF_BOUNDS,
    FeasibilityVerdict,
    FeasibilityViolation,
    check_step,
    check_structure,
)
from .world import (
    ASSEMBLY,
    ROTATIONS,
    STORAGE,
    BrickPlacement,
    Catalog,
    Dims,
    WorkspaceState,
)

ASSEMBLY_DIR = "assembly"
DISASSEMBLY_DIR = "disassembly"
DIRECTIONS = (ASSEMBLY_DIR, DISASSEMBLY_DIR)


@dataclass(frozen=True)
class Pose:
    x: int
    y: int
    z: int
    rot: int

    def __post_init__(self) -> None:
        if self.rot not in ROTATIONS:
            raise ValueError(f"rotation must be one of {ROTATIONS}, got {self.rot}")

    def footprint_equivalent(self, other: Pose) -> bool:
        """Same anchor and layer, rotations that give the same cell set."""
        return (
            (self.x, self.y, self.z) == (other.x, other.y, other.z)
            and self.rot % 180 == other.rot % 180
        )


@dataclass(frozen=True)
class TaskNode:
    """One brick move: type, storage pose, and assembly pose."""

    index: int
    brick_type: str
    storage_pose: Pose
    assembly_pose: Pose


@dataclass(frozen=True)
class TaskGraph:
    direction: str
    nodes: tuple[TaskNode, ...] = ()

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        for i, node in enumerate(self.nodes):
            if node.index != i:
                raise ValueError(f"node at position {i} carries index {node.index}")

    def __len__(self) -> int:
        return len(self.nodes)


def reverse(graph: TaskGraph) -> TaskGraph:
    """Same moves in reversed order with the direction flipped.

    Node fields are preserved; only the positional index is renumbered so
    node i maps to T-1-i. A reversed assembly node reads as: detach the
    brick from its assembly pose and put it back at its storage pose.
    """
    direction = DISASSEMBLY_DIR if graph.direction == ASSEMBLY_DIR else ASSEMBLY_DIR
    nodes = tuple(
        replace(node, index=i) for i, node in enumerate(reversed(graph.nodes))
    )
    return TaskGraph(direction, nodes)


def _storage_placement(node: TaskNode, instance_id: int) -> BrickPlacement:
    p = node.storage_pose
    return BrickPlacement(instance_id, node.brick_type, p.x, p.y, p.z, p.rot)


def _assembly_placement(node: TaskNode, instance_id: int) -> BrickPlacement:
    p = node.assembly_pose
    return BrickPlacement(instance_id, node.brick_type, p.x, p.y, p.z, p.rot)


def synth_storage(graph: TaskGraph, catalog: Catalog, dims: Dims) -> WorkspaceState:
    """Storage layout implied by the graph: every node's brick at its storage pose.

    Instance ids follow node order (node i -> id i+1 for assembly graphs,
    reversed for disassembly so ids match the assembly-order numbering).
    """
    state = WorkspaceState.empty(STORAGE, dims, catalog)
    nodes = graph.nodes if graph.direction == ASSEMBLY_DIR else tuple(reversed(graph.nodes))
    for i, node in enumerate(nodes):
        state = world.place(state, _storage_placement(node, i + 1))
    return state


def synth_assembly(graph: TaskGraph, catalog: Catalog, dims: Dims) -> WorkspaceState:
    """Built structure implied by the graph's assembly poses."""
    state = WorkspaceState.empty(ASSEMBLY, dims, catalog)
    nodes = graph.nodes if graph.direction == ASSEMBLY_DIR else tuple(reversed(graph.nodes))
    for i, node in enumerate(nodes):
        state = world.place(state, _assembly_placement(node, i + 1))
    return state


def _node_violation(code: str, index: int, detail: str) -> FeasibilityViolation:
    return FeasibilityViolation(code, index, f"node {index}: {detail}")


def validate(graph: TaskGraph, catalog: Catalog, dims: Dims) -> FeasibilityVerdict:
    """Structural dry run of the whole sequence.

    Assembly graphs: the implied storage layout must be consistent, and
    each node must pass the per-step structural check in order.
    Disassembly graphs: each removal must leave a valid structure and the
    storage return cells must be free. Violations carry the node index in
    the instance field. After the first hard violation the state freezes
    and later nodes are judged against it (audit mode).
    """
    violations: list[FeasibilityViolation] = []
    if graph.direction == ASSEMBLY_DIR:
        storage = WorkspaceState.empty(STORAGE, dims, catalog)
        skipped: set[int] = set()
        for node in graph.nodes:
            try:
                storage = world.place(storage, _storage_placement(node, node.index + 1))
            except CellOccupiedError as exc:
                violations.append(
                    _node_violation(COLLISION, node.index, f"storage pose: {exc}")
                )
                skipped.add(node.index)
            except (OutOfBoundsError, UnknownTypeError, ValueError) as exc:
                violations.append(
                    _node_violation(OUT_OF_BOUNDS, node.index, f"storage pose: {exc}")
                )
                skipped.add(node.index)
        assembly = WorkspaceState.empty(ASSEMBLY, dims, catalog)
        frozen = bool(skipped)
        for node in graph.nodes:
            placement = _assembly_placement(node, node.index + 1)
            verdict = check_step(assembly, placement)
            for v in verdict.violations:
                violations.append(_node_violation(v.code, node.index, v.detail))
            if verdict.ok and not frozen:
                assembly = world.place(assembly, placement)
            elif not verdict.ok:
                frozen = True
        return FeasibilityVerdict.from_violations(violations)

    # Disassembly: tear the implied structure down node by node.
    try:
        assembly = synth_assembly(graph, catalog, dims)
    except (CellOccupiedError, OutOfBoundsError, UnknownTypeError, ValueError) as exc:
        violations.append(_node_violation(COLLISION, 0, f"implied structure invalid: {exc}"))
        return FeasibilityVerdict.from_violations(violations)
    storage = WorkspaceState.empty(STORAGE, dims, catalog)
    total = len(graph.nodes)
    frozen = False
    for node in graph.nodes:
        instance_id = total - node.index
        step_bad = False
        remainder = world.remove(assembly, instance_id)
        after = check_structure(remainder)
        for v in after.violations:
            violations.append(
                _node_violation(v.code, node.index, f"after removal: {v.detail}")
            )
        if not after.ok:
            step_bad = True
        return_placement = _storage_placement(node, instance_id)
        verdict = check_step(storage, return_placement)
        for v in verdict.violations:
            violations.append(_node_violation(v.code, node.index, f"storage return: {v.detail}"))
        if not verdict.ok:
            step_bad = True
        if not frozen and not step_bad:
            assembly = remainder
            storage = world.place(storage, return_placement)
        elif step_bad:
            frozen = True
    return FeasibilityVerdict.from_violations(violations)


# --- text format ---


def serialize(graph: TaskGraph) -> str:
    """Task-graph file: header then one line per node."""
    lines = [f"taskgraph v1 {graph.direction} {len(graph.nodes)}"]
    for n in graph.nodes:
        s, a = n.storage_pose, n.assembly_pose
        lines.append(
            f"{n.index} {n.brick_type} {s.x} {s.y} {s.z} {s.rot} {a.x} {a.y} {a.z} {a.rot}"
        )
    return "\n".join(lines) + "\n"


def parse(text: str) -> TaskGraph:
    entries: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            entries.append((lineno, line))
    if not entries:
        raise ParseError("missing 'taskgraph v1 <direction> <T>' header", 1)
    lineno, header = entries[0]
    parts = header.split()
    if len(parts) != 4 or parts[0] != "taskgraph" or parts[1] != "v1":
        raise ParseError(f"expected 'taskgraph v1 <direction> <T>', got {header!r}", lineno)
    direction = parts[2]
    if direction not in DIRECTIONS:
        raise ParseError(f"unknown direction {direction!r}", lineno)
    try:
        count = int(parts[3])
    except ValueError:
        raise ParseError(f"bad node count {parts[3]!r}", lineno) from None
    body = entries[1:]
    if len(body) != count:
        raise ParseError(
            f"header promises {count} nodes but file has {len(body)}", lineno
        )
    nodes = []
    for position, (lineno, line) in enumerate(body):
        parts = line.split()
        if len(parts) != 10:
            raise ParseError(
                f"expected '<i> <type_id> <xs> <ys> <zs> <rots> <xa> <ya> <za> <rota>', got {line!r}",
                lineno,
            )
        try:
            index = int(parts[0])
            numbers = [int(v) for v in parts[2:]]
        except ValueError:
            raise ParseError(f"bad number in {line!r}", lineno) from None
        if index != position:
            raise ParseError(f"node index {index} out of order (expected {position})", lineno)
        try:
            storage_pose = Pose(*numbers[0:4])
            assembly_pose = Pose(*numbers[4:8])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        nodes.append(TaskNode(index, parts[1], storage_pose, assembly_pose))
    return TaskGraph(direction, tuple(nodes))


def graph_id(graph: TaskGraph) -> str:
    """Stable content id of a graph: hash of its serialized form."""
    return hashlib.sha256(serialize(graph).encode("utf-8")).hexdigest()[:12]
