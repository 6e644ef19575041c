"""Digital twin: replay a task graph against simulated plates and report per step.

Each step is judged three ways: structural feasibility, tool operability,
and reachability. Structural violations are hard: the state freezes and
the remaining steps are still evaluated against the last consistent state
but marked not-applied. Clearance and reach violations are soft: the move
still applies so later steps can be audited in context.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import world
from .errors import (
    EndOfGraphError,
    InvalidIndexError,
    StorageMismatchError,
)
from .feasibility import (
    FeasibilityVerdict,
    FeasibilityViolation,
    check_step,
    check_structure,
)
from .manipulation import (
    OperabilityVerdict,
    ToolProfile,
    assembly_operable,
    free_side,
    removable,
)
from .taskgraph import (
    ASSEMBLY_DIR,
    Pose,
    TaskGraph,
    TaskNode,
    graph_id,
    reverse,
)
from .world import (
    ASSEMBLY,
    STORAGE,
    BrickPlacement,
    Dims,
    WorkspaceState,
    footprint_cells,
)

REACH_OK = "ok"
UNREACHABLE = "UNREACHABLE"

OPERABLE = "operable"
INOPERABLE = "inoperable"

Rect = tuple[int, int, int, int]  # (x0, y0, x1, y1), half-open


@dataclass(frozen=True)
class ReachEnvelope:
    """Axis-aligned reachable regions per plate plus a height ceiling.

    The ceiling caps the robot flange, which sits ``tool_length`` layers
    above the brick being worked on; a brick at layer z is reachable when
    z + tool_length stays at or below ``max_reach_height``.
    """

    storage_rect: Rect
    assembly_rect: Rect
    max_reach_height: int = 64

    def __post_init__(self) -> None:
        for rect in (self.storage_rect, self.assembly_rect):
            x0, y0, x1, y1 = rect
            if x0 < 0 or y0 < 0 or x1 <= x0 or y1 <= y0:
                raise ValueError(f"reach rectangle {rect} is empty or negative")
        if self.max_reach_height < 1:
            raise ValueError("reach ceiling must be at least one layer")

    @classmethod
    def full(cls, dims: Dims, max_reach_height: int = 64) -> ReachEnvelope:
        w, l, _ = dims
        return cls((0, 0, w, l), (0, 0, w, l), max_reach_height)

    def rect_for(self, workspace_id: str) -> Rect:
        return self.storage_rect if workspace_id == STORAGE else self.assembly_rect


@dataclass(frozen=True)
class StepRecord:
    """Outcome of one node: verdicts, reach, and whether the move applied."""

    index: int
    applied: bool
    feasibility: FeasibilityVerdict
    operability: OperabilityVerdict
    reachability: str
    reach_detail: str = ""
    twist_side: str | None = None

    @property
    def fully_ok(self) -> bool:
        return (
            self.applied
            and self.feasibility.ok
            and self.operability.ok
            and self.reachability == REACH_OK
        )


@dataclass(frozen=True)
class VerificationReport:
    graph_id: str
    direction: str
    overall: str
    steps: tuple[StepRecord, ...]

    @property
    def operable(self) -> bool:
        return self.overall == OPERABLE

    def render(self) -> str:
        """Line-oriented text form; deterministic for identical inputs."""
        lines = [f"report v1 {self.graph_id} {self.direction} {self.overall}"]
        for s in self.steps:
            feas = "ok" if s.feasibility.ok else "fail"
            oper = "ok" if s.operability.ok else "fail"
            tokens = [f"step {s.index} {feas} {oper} {s.reachability}"]
            tokens += [v.code for v in s.feasibility.violations]
            tokens += [v.code for v in s.operability.violations]
            if not s.applied:
                tokens.append("not-applied")
            lines.append(" ".join(tokens))
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return {
            "graph_id": self.graph_id,
            "direction": self.direction,
            "overall": self.overall,
            "steps": [
                {
                    "index": s.index,
                    "applied": s.applied,
                    "feasibility": {
                        "ok": s.feasibility.ok,
                        "violations": [
                            {"code": v.code, "instance_id": v.instance_id, "detail": v.detail}
                            for v in s.feasibility.violations
                        ],
                    },
                    "operability": {
                        "ok": s.operability.ok,
                        "violations": [
                            {"code": v.code, "cells": [list(c) for c in v.cells], "detail": v.detail}
                            for v in s.operability.violations
                        ],
                    },
                    "reachability": s.reachability,
                    "reach_detail": s.reach_detail,
                    "twist_side": s.twist_side,
                }
                for s in self.steps
            ],
        }


@dataclass(frozen=True)
class RoundTrip:
    """Forward and reverse reports plus the final plate states."""

    forward: VerificationReport
    reverse: VerificationReport
    final_storage: WorkspaceState
    final_assembly: WorkspaceState

    @property
    def operable(self) -> bool:
        return self.forward.operable and self.reverse.operable


def _find_instance(state: WorkspaceState, pose: Pose, type_id: str) -> int | None:
    for instance_id in sorted(state.placements):
        p = state.placements[instance_id]
        if (
            p.type_id == type_id
            and (p.x, p.y, p.z) == (pose.x, pose.y, pose.z)
            and p.rot % 180 == pose.rot % 180
        ):
            return instance_id
    return None


class TwinSession:
    """Single-owner replay of one graph; supports step, rewind, full run."""

    def __init__(
        self,
        graph: TaskGraph,
        storage: WorkspaceState,
        assembly: WorkspaceState | None = None,
        tool: ToolProfile | None = None,
        reach: ReachEnvelope | None = None,
    ):
        if assembly is None:
            assembly = WorkspaceState.empty(ASSEMBLY, storage.dims, storage.catalog)
        self.graph = graph
        self.tool = tool if tool is not None else ToolProfile()
        self.reach = reach if reach is not None else ReachEnvelope.full(storage.dims)
        self._initial_storage = storage
        self._initial_assembly = assembly
        self.storage_state = storage
        self.assembly_state = assembly
        self.cursor = 0
        self.history: list[StepRecord] = []
        self._frozen = False
        self._check_initial_inventory()

    def _check_initial_inventory(self) -> None:
        """The graph's source bricks must all be present up front."""
        if self.graph.direction == ASSEMBLY_DIR:
            state, which = self._initial_storage, "storage"
            poses = [(n.storage_pose, n.brick_type, n.index) for n in self.graph.nodes]
        else:
            state, which = self._initial_assembly, "assembly"
            poses = [(n.assembly_pose, n.brick_type, n.index) for n in self.graph.nodes]
        claimed: set[int] = set()
        for pose, type_id, index in poses:
            instance_id = _find_instance(state, pose, type_id)
            if instance_id is None:
                raise StorageMismatchError(
                    f"node {index}: no {type_id} at {which} pose "
                    f"({pose.x}, {pose.y}, {pose.z}, rot {pose.rot})"
                )
            if instance_id in claimed:
                raise StorageMismatchError(
                    f"node {index}: {which} brick at ({pose.x}, {pose.y}, {pose.z}) "
                    "is claimed by two nodes"
                )
            claimed.add(instance_id)

    # --- reachability ---

    def _pose_reach(self, workspace_id: str, placement: BrickPlacement) -> str | None:
        x0, y0, x1, y1 = self.reach.rect_for(workspace_id)
        for (cx, cy, _) in footprint_cells(placement, self._initial_storage.catalog):
            if not (x0 <= cx < x1 and y0 <= cy < y1):
                return f"{workspace_id} pose ({placement.x}, {placement.y}) outside reach rectangle"
        if placement.z + self.tool.tool_length > self.reach.max_reach_height:
            return (
                f"{workspace_id} pose at layer {placement.z} puts the flange above "
                f"the reach ceiling {self.reach.max_reach_height}"
            )
        return None

    # --- stepping ---

    def step(self) -> StepRecord:
        """Evaluate and (when clean) apply exactly one node."""
        if self.cursor >= len(self.graph.nodes):
            raise EndOfGraphError(f"all {len(self.graph.nodes)} nodes already stepped")
        node = self.graph.nodes[self.cursor]
        if self.graph.direction == ASSEMBLY_DIR:
            record = self._step_assembly(node)
        else:
            record = self._step_disassembly(node)
        self.history.append(record)
        self.cursor += 1
        if not record.feasibility.ok:
            self._frozen = True
        return record

    def _step_assembly(self, node: TaskNode) -> StepRecord:
        source_id = _find_instance(self.storage_state, node.storage_pose, node.brick_type)
        if source_id is None:
            raise StorageMismatchError(
                f"node {node.index}: storage brick vanished mid-replay"
            )
        source = self.storage_state.placements[source_id]
        pose = node.assembly_pose
        target_id = (
            source_id
            if source_id not in self.assembly_state.placements
            else self.assembly_state.next_instance_id()
        )
        placement = BrickPlacement(target_id, node.brick_type, pose.x, pose.y, pose.z, pose.rot)

        reach_problems = [
            problem
            for problem in (
                self._pose_reach(STORAGE, source),
                self._pose_reach(ASSEMBLY, placement),
            )
            if problem
        ]
        feasibility = check_step(self.assembly_state, placement)
        operability = assembly_operable(self.assembly_state, placement, self.tool)
        applied = feasibility.ok and not self._frozen
        if applied:
            self.storage_state = world.remove(self.storage_state, source_id)
            self.assembly_state = world.place(self.assembly_state, placement)
        return StepRecord(
            index=node.index,
            applied=applied,
            feasibility=feasibility,
            operability=operability,
            reachability=REACH_OK if not reach_problems else UNREACHABLE,
            reach_detail="; ".join(reach_problems),
        )

    def _step_disassembly(self, node: TaskNode) -> StepRecord:
        instance_id = _find_instance(self.assembly_state, node.assembly_pose, node.brick_type)
        if instance_id is None:
            raise StorageMismatchError(
                f"node {node.index}: assembly brick vanished mid-replay"
            )
        victim = self.assembly_state.placements[instance_id]
        pose = node.storage_pose
        return_id = (
            instance_id
            if instance_id not in self.storage_state.placements
            else self.storage_state.next_instance_id()
        )
        return_placement = BrickPlacement(
            return_id, node.brick_type, pose.x, pose.y, pose.z, pose.rot
        )

        reach_problems = [
            problem
            for problem in (
                self._pose_reach(ASSEMBLY, victim),
                self._pose_reach(STORAGE, return_placement),
            )
            if problem
        ]
        violations: list[FeasibilityViolation] = []
        remainder = world.remove(self.assembly_state, instance_id)
        after = check_structure(remainder)
        for v in after.violations:
            violations.append(
                FeasibilityViolation(v.code, v.instance_id, f"after removal: {v.detail}")
            )
        return_verdict = check_step(self.storage_state, return_placement)
        for v in return_verdict.violations:
            violations.append(
                FeasibilityViolation(v.code, v.instance_id, f"storage return: {v.detail}")
            )
        feasibility = FeasibilityVerdict.from_violations(violations)
        operability = removable(self.assembly_state, instance_id, self.tool)
        side = free_side(self.assembly_state, instance_id, self.tool)
        applied = feasibility.ok and not self._frozen
        if applied:
            self.assembly_state = remainder
            self.storage_state = world.place(self.storage_state, return_placement)
        return StepRecord(
            index=node.index,
            applied=applied,
            feasibility=feasibility,
            operability=operability,
            reachability=REACH_OK if not reach_problems else UNREACHABLE,
            reach_detail="; ".join(reach_problems),
            twist_side=side,
        )

    def rewind(self, to_index: int) -> TwinSession:
        """Restore the session to just after node ``to_index - 1``."""
        if not (0 <= to_index <= self.cursor):
            raise InvalidIndexError(
                f"cannot rewind to {to_index}; cursor is at {self.cursor}"
            )
        self.storage_state = self._initial_storage
        self.assembly_state = self._initial_assembly
        self.cursor = 0
        self.history = []
        self._frozen = False
        for _ in range(to_index):
            self.step()
        return self

    def run(self) -> VerificationReport:
        while self.cursor < len(self.graph.nodes):
            self.step()
        return self.report()

    def report(self) -> VerificationReport:
        if self.cursor != len(self.graph.nodes):
            raise InvalidIndexError("report requires a completed run")
        overall = OPERABLE if all(s.fully_ok for s in self.history) else INOPERABLE
        return VerificationReport(
            graph_id=graph_id(self.graph),
            direction=self.graph.direction,
            overall=overall,
            steps=tuple(self.history),
        )


def execute(
    graph: TaskGraph,
    storage: WorkspaceState,
    tool: ToolProfile | None = None,
    reach: ReachEnvelope | None = None,
    assembly: WorkspaceState | None = None,
) -> VerificationReport:
    """Run a whole graph and report; see TwinSession for the semantics."""
    return TwinSession(graph, storage, assembly, tool, reach).run()


def verify_roundtrip(
    graph: TaskGraph,
    storage: WorkspaceState,
    tool: ToolProfile | None = None,
    reach: ReachEnvelope | None = None,
) -> RoundTrip:
    """Execute the assembly graph, then its reverse from the resulting states.

    When both runs are operable, the assembly plate ends empty and the
    storage plate ends deep-equal to its initial layout.
    """
    if graph.direction != ASSEMBLY_DIR:
        raise ValueError("round trips start from an assembly-direction graph")
    forward_session = TwinSession(graph, storage, None, tool, reach)
    forward = forward_session.run()
    reverse_session = TwinSession(
        reverse(graph),
        forward_session.storage_state,
        forward_session.assembly_state,
        tool,
        reach,
    )
    reverse_report = reverse_session.run()
    return RoundTrip(
        forward=forward,
        reverse=reverse_report,
        final_storage=reverse_session.storage_state,
        final_assembly=reverse_session.assembly_state,
    )
