"""Demonstration sessions: interactive steps, frame ingestion, verification, persistence.

A session owns live storage and assembly states plus the task graph
learned so far. Steps are transactional: a rejected move never mutates
state. Sessions persist as a directory of the engine's text formats plus
a small JSON manifest; reports are reproduced on load by re-running the
(deterministic) verification.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import world
from .demogen import find_instance_at
from .errors import (
    CellOccupiedError,
    DemonstrationError,
    EmptyGraphError,
    InitialAssemblyNotEmptyError,
    InvalidLayoutError,
    MultiBrickChangeError,
    NoChangeError,
    OutOfBoundsError,
    UnknownSessionError,
)
from .feasibility import FeasibilityVerdict, check_step, check_structure
from .learner import diff_keyframes
from .manipulation import OperabilityVerdict, ToolProfile, assembly_operable
from .perception import (
    DEFAULT_STABILITY_WINDOW,
    Snapshot,
    detect_scene_keyframes,
    dump_demo,
    parse_demo,
    top_surface,
)
from .scenarios import desk_scenario
from .taskgraph import ASSEMBLY_DIR, Pose, TaskGraph, TaskNode, parse, serialize
from .twin import ReachEnvelope, RoundTrip, verify_roundtrip
from .world import (
    ASSEMBLY,
    BrickPlacement,
    Catalog,
    WorkspaceState,
    dump_catalog,
    dump_structure,
    parse_catalog,
    parse_structure,
)

DEMONSTRATING = "demonstrating"
DONE = "done"

STEPS_PATH = "steps"
FRAMES_PATH = "frames"


@dataclass(frozen=True)
class StepFeedback:
    """Outcome of one interactive move attempt."""

    accepted: bool
    feasibility: FeasibilityVerdict
    operability: OperabilityVerdict
    node: TaskNode | None
    graph_length: int

    def violation_dicts(self) -> list[dict]:
        out = [
            {"code": v.code, "detail": v.detail, "cells": []}
            for v in self.feasibility.violations
        ]
        out += [
            {"code": v.code, "detail": v.detail, "cells": [list(c) for c in v.cells]}
            for v in self.operability.violations
        ]
        return out


@dataclass(frozen=True)
class FramesFeedback:
    new_nodes: tuple[TaskNode, ...]
    keyframe_count: int
    graph_length: int


@dataclass
class Session:
    """One demonstration in progress; mutate only under the lock."""

    session_id: str
    catalog: Catalog
    tool: ToolProfile
    reach: ReachEnvelope
    stability_window: int
    initial_storage: WorkspaceState
    storage_state: WorkspaceState
    assembly_state: WorkspaceState
    frames: list[Snapshot] = field(default_factory=list)
    processed_keyframes: int = 0
    nodes: list[TaskNode] = field(default_factory=list)
    input_path: str | None = None
    status: str = DEMONSTRATING
    roundtrip: RoundTrip | None = None
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def graph(self) -> TaskGraph:
        return TaskGraph(ASSEMBLY_DIR, tuple(self.nodes))


class SessionManager:
    """Registry of concurrent sessions; per-session operations serialize."""

    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create_session(
        self,
        catalog: Catalog | None = None,
        storage: WorkspaceState | None = None,
        tool: ToolProfile | None = None,
        reach: ReachEnvelope | None = None,
        stability_window: int = DEFAULT_STABILITY_WINDOW,
        session_id: str | None = None,
    ) -> str:
        catalog = catalog if catalog is not None else Catalog.default()
        storage = storage if storage is not None else desk_scenario(catalog)
        verdict = check_structure(storage)
        if not verdict.ok:
            raise InvalidLayoutError(
                "; ".join(f"{v.code} instance {v.instance_id}" for v in verdict.violations)
            )
        tool = tool if tool is not None else ToolProfile()
        reach = reach if reach is not None else ReachEnvelope.full(storage.dims)
        if session_id is None:
            session_id = uuid.uuid4().hex[:12]
        session = Session(
            session_id=session_id,
            catalog=catalog,
            tool=tool,
            reach=reach,
            stability_window=stability_window,
            initial_storage=storage,
            storage_state=storage,
            assembly_state=WorkspaceState.empty(ASSEMBLY, storage.dims, catalog),
        )
        with self._lock:
            if session_id in self._sessions:
                raise InvalidLayoutError(f"session id {session_id} already exists")
            self._sessions[session_id] = session
        return session_id

    def get(self, session_id: str) -> Session:
        with self._lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise UnknownSessionError(f"no session {session_id!r}") from None

    def session_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._sessions)

    # --- demonstration inputs ---

    def submit_step(
        self, session_id: str, instance_id: int, x: int, y: int, z: int, rot: int
    ) -> StepFeedback:
        session = self.get(session_id)
        with session.lock:
            if session.input_path == FRAMES_PATH:
                raise DemonstrationError(
                    "session is frame-driven; interactive steps would diverge"
                )
            source = session.storage_state.placement(instance_id)
            target_id = (
                instance_id
                if instance_id not in session.assembly_state.placements
                else session.assembly_state.next_instance_id()
            )
            placement = BrickPlacement(target_id, source.type_id, x, y, z, rot)
            feasibility = check_step(session.assembly_state, placement)
            operability = assembly_operable(session.assembly_state, placement, session.tool)
            if not (feasibility.ok and operability.ok):
                return StepFeedback(False, feasibility, operability, None, len(session.nodes))
            node = TaskNode(
                len(session.nodes),
                source.type_id,
                Pose(source.x, source.y, source.z, source.rot),
                Pose(x, y, z, rot),
            )
            session.storage_state = world.remove(session.storage_state, instance_id)
            session.assembly_state = world.place(session.assembly_state, placement)
            session.nodes.append(node)
            session.input_path = STEPS_PATH
            session.status = DEMONSTRATING
            return StepFeedback(True, feasibility, operability, node, len(session.nodes))

    def submit_frames(self, session_id: str, frames: list[Snapshot]) -> FramesFeedback:
        session = self.get(session_id)
        with session.lock:
            if session.input_path == STEPS_PATH:
                raise DemonstrationError(
                    "session is step-driven; camera frames would diverge"
                )
            if not frames:
                return FramesFeedback((), session.processed_keyframes, len(session.nodes))
            if session.frames and frames[0].timestamp < session.frames[-1].timestamp:
                raise DemonstrationError(
                    f"frames rewind time: {frames[0].timestamp}ms after "
                    f"{session.frames[-1].timestamp}ms"
                )
            session.frames.extend(frames)
            session.input_path = FRAMES_PATH
            keyframes = detect_scene_keyframes(session.frames, session.stability_window)
            new_nodes: list[TaskNode] = []
            while session.processed_keyframes < len(keyframes):
                index = session.processed_keyframes
                if index == 0:
                    self._check_first_keyframe(session, keyframes[0])
                else:
                    node = self._apply_keyframe_pair(
                        session, keyframes[index - 1], keyframes[index], index
                    )
                    if node is not None:
                        new_nodes.append(node)
                session.processed_keyframes = index + 1
            return FramesFeedback(tuple(new_nodes), len(keyframes), len(session.nodes))

    def _check_first_keyframe(self, session: Session, keyframe) -> None:
        if keyframe.assembly.heights.any():
            raise InitialAssemblyNotEmptyError(
                "assembly plate is not empty at the first keyframe", keyframe_index=0
            )
        observed = keyframe.storage
        heights, colors = top_surface(session.storage_state)
        if not (np.array_equal(heights, observed.heights)
                and np.array_equal(colors, observed.colors)):
            raise MultiBrickChangeError(
                "first keyframe's storage does not match the session layout",
                keyframe_index=0,
            )

    def _apply_keyframe_pair(
        self, session: Session, prev, next_, index: int
    ) -> TaskNode | None:
        try:
            diff = diff_keyframes(prev, next_, session.catalog)
        except NoChangeError:
            return None
        except DemonstrationError as exc:
            raise type(exc)(str(exc), keyframe_index=index) from exc
        source_id = find_instance_at(
            session.storage_state, diff.storage_pose, diff.brick_type
        )
        if source_id is None:
            raise MultiBrickChangeError(
                f"no {diff.brick_type} on the live storage plate at "
                f"({diff.storage_pose.x}, {diff.storage_pose.y})",
                keyframe_index=index,
            )
        pose = diff.assembly_pose
        target_id = (
            source_id
            if source_id not in session.assembly_state.placements
            else session.assembly_state.next_instance_id()
        )
        placement = BrickPlacement(target_id, diff.brick_type, pose.x, pose.y, pose.z, pose.rot)
        try:
            next_assembly = world.place(session.assembly_state, placement)
        except (CellOccupiedError, OutOfBoundsError) as exc:
            raise MultiBrickChangeError(
                f"inferred move conflicts with the live state: {exc}", keyframe_index=index
            ) from exc
        heights, colors = top_surface(next_assembly)
        if not (np.array_equal(heights, next_.assembly.heights)
                and np.array_equal(colors, next_.assembly.colors)):
            raise MultiBrickChangeError(
                "observation not fully explained by a single brick move",
                keyframe_index=index,
            )
        node = TaskNode(len(session.nodes), diff.brick_type, diff.storage_pose, pose)
        session.assembly_state = next_assembly
        session.storage_state = world.remove(session.storage_state, source_id)
        session.nodes.append(node)
        session.status = DEMONSTRATING
        return node

    # --- verification ---

    def verify(self, session_id: str) -> RoundTrip:
        session = self.get(session_id)
        with session.lock:
            if not session.nodes:
                raise EmptyGraphError("no demonstrated steps to verify")
            trip = verify_roundtrip(
                session.graph(), session.initial_storage, session.tool, session.reach
            )
            session.roundtrip = trip
            session.status = DONE
            return trip

    def get_graph(self, session_id: str) -> TaskGraph:
        return self.get(session_id).graph()

    def get_report(self, session_id: str) -> RoundTrip | None:
        return self.get(session_id).roundtrip

    # --- persistence ---

    def save_session(self, session_id: str, directory: str | Path) -> Path:
        """Write the session as a directory of the engine's text formats."""
        session = self.get(session_id)
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        with session.lock:
            manifest = {
                "session_id": session.session_id,
                "status": session.status,
                "input_path": session.input_path,
                "stability_window": session.stability_window,
                "processed_keyframes": session.processed_keyframes,
                "tool": {
                    "margin": session.tool.margin,
                    "body_height": session.tool.body_height,
                    "tool_length": session.tool.tool_length,
                },
                "reach": {
                    "storage_rect": list(session.reach.storage_rect),
                    "assembly_rect": list(session.reach.assembly_rect),
                    "max_reach_height": session.reach.max_reach_height,
                },
                "has_report": session.roundtrip is not None,
            }
            (directory / "manifest.json").write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
            (directory / "catalog.txt").write_text(
                dump_catalog(session.catalog), encoding="utf-8"
            )
            (directory / "storage_initial.bricks").write_text(
                dump_structure(session.initial_storage), encoding="utf-8"
            )
            (directory / "storage_live.bricks").write_text(
                dump_structure(session.storage_state), encoding="utf-8"
            )
            (directory / "assembly_live.bricks").write_text(
                dump_structure(session.assembly_state), encoding="utf-8"
            )
            (directory / "graph.task").write_text(
                serialize(session.graph()), encoding="utf-8"
            )
            if session.frames:
                (directory / "demo.log").write_text(
                    dump_demo(session.frames), encoding="utf-8"
                )
            if session.roundtrip is not None:
                (directory / "report_forward.txt").write_text(
                    session.roundtrip.forward.render(), encoding="utf-8"
                )
                (directory / "report_reverse.txt").write_text(
                    session.roundtrip.reverse.render(), encoding="utf-8"
                )
        return directory

    def load_session(self, directory: str | Path) -> str:
        """Rebuild a persisted session; reports are re-verified deterministically."""
        directory = Path(directory)
        manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
        catalog = parse_catalog((directory / "catalog.txt").read_text(encoding="utf-8"))
        initial_storage = parse_structure(
            (directory / "storage_initial.bricks").read_text(encoding="utf-8"),
            catalog,
            workspace_id="storage",
        )
        storage_live = parse_structure(
            (directory / "storage_live.bricks").read_text(encoding="utf-8"),
            catalog,
            workspace_id="storage",
        )
        assembly_live = parse_structure(
            (directory / "assembly_live.bricks").read_text(encoding="utf-8"),
            catalog,
            workspace_id="assembly",
        )
        graph = parse((directory / "graph.task").read_text(encoding="utf-8"))
        frames: list[Snapshot] = []
        demo_path = directory / "demo.log"
        if demo_path.exists():
            frames = parse_demo(demo_path.read_text(encoding="utf-8"))
        tool = ToolProfile(**manifest["tool"])
        reach = ReachEnvelope(
            tuple(manifest["reach"]["storage_rect"]),
            tuple(manifest["reach"]["assembly_rect"]),
            manifest["reach"]["max_reach_height"],
        )
        session = Session(
            session_id=manifest["session_id"],
            catalog=catalog,
            tool=tool,
            reach=reach,
            stability_window=manifest["stability_window"],
            initial_storage=initial_storage,
            storage_state=storage_live,
            assembly_state=assembly_live,
            frames=frames,
            processed_keyframes=manifest["processed_keyframes"],
            nodes=list(graph.nodes),
            input_path=manifest["input_path"],
            status=manifest["status"],
        )
        if manifest["has_report"] and graph.nodes:
            session.roundtrip = verify_roundtrip(graph, initial_storage, tool, reach)
        with self._lock:
            self._sessions[session.session_id] = session
        return session.session_id
