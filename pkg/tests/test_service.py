"""Session lifecycle: steps, frames, verification, persistence."""

from __future__ import annotations

import random

import pytest

from brickworks.demogen import random_script, render_script
from brickworks.errors import (
    DemonstrationError,
    EmptyGraphError,
    InvalidLayoutError,
    UnknownInstanceError,
    UnknownSessionError,
)
from brickworks.feasibility import UNSUPPORTED
from brickworks.learner import learn
from brickworks.manipulation import NO_TOP_CLEARANCE
from brickworks.perception import detect_scene_keyframes
from brickworks.scenarios import tight_gap_storage
from brickworks.service import SessionManager
from brickworks.taskgraph import serialize
from brickworks.world import (
    ASSEMBLY,
    STORAGE,
    BrickPlacement,
    Catalog,
    WorkspaceState,
    place,
)

CATALOG = Catalog.default()
DIMS = (16, 16, 8)


def storage_with(*specs, dims=DIMS):
    state = WorkspaceState.empty(STORAGE, dims, CATALOG)
    for i, (type_id, x, y, z, rot) in enumerate(specs, start=1):
        state = place(state, BrickPlacement(i, type_id, x, y, z, rot))
    return state


def fresh(storage=None):
    manager = SessionManager()
    storage = storage if storage is not None else storage_with(
        ("2x2_red", 0, 0, 1, 0), ("2x2_blue", 4, 0, 1, 0), ("2x2_green", 8, 0, 1, 0)
    )
    session_id = manager.create_session(CATALOG, storage)
    return manager, session_id


class TestCreate:
    def test_distinct_ids(self):
        manager = SessionManager()
        a = manager.create_session()
        b = manager.create_session()
        assert a != b
        assert set(manager.session_ids()) == {a, b}

    def test_default_layout_is_queryable(self):
        manager = SessionManager()
        sid = manager.create_session()
        session = manager.get(sid)
        assert len(session.storage_state.placements) > 0
        assert session.assembly_state.placements == {}

    def test_invalid_layout_rejected(self):
        bad = storage_with(("2x2_red", 0, 0, 1, 0), ("2x2_blue", 4, 4, 3, 0))
        manager = SessionManager()
        with pytest.raises(InvalidLayoutError):
            manager.create_session(CATALOG, bad)

    def test_unknown_session(self):
        manager = SessionManager()
        with pytest.raises(UnknownSessionError):
            manager.get("nope")


class TestSubmitStep:
    def test_accepted_move_grows_graph(self):
        manager, sid = fresh()
        feedback = manager.submit_step(sid, 1, 8, 8, 1, 0)
        assert feedback.accepted
        assert feedback.graph_length == 1
        assert feedback.node.storage_pose.x == 0
        session = manager.get(sid)
        assert len(session.storage_state.placements) == 2
        assert len(session.assembly_state.placements) == 1

    def test_floating_move_rejected_without_mutation(self):
        manager, sid = fresh()
        before = manager.get(sid).storage_state
        feedback = manager.submit_step(sid, 1, 8, 8, 3, 0)
        assert not feedback.accepted
        assert UNSUPPORTED in feedback.feasibility.codes()
        assert manager.get(sid).storage_state == before
        assert manager.get(sid).assembly_state.placements == {}
        assert feedback.graph_length == 0

    def test_tight_gap_rejection_names_blocking_cells(self):
        manager = SessionManager()
        sid = manager.create_session(CATALOG, tight_gap_storage())
        moves = [(1, 4, 5, 1), (2, 6, 5, 1), (3, 4, 5, 2), (4, 6, 5, 2), (5, 4, 5, 3), (6, 6, 5, 3)]
        for iid, x, y, z in moves:
            assert manager.submit_step(sid, iid, x, y, z, 0).accepted
        feedback = manager.submit_step(sid, 7, 5, 5, 1, 0)
        assert not feedback.accepted
        assert NO_TOP_CLEARANCE in feedback.operability.codes()
        assert feedback.operability.violations[0].cells

    def test_unknown_instance(self):
        manager, sid = fresh()
        with pytest.raises(UnknownInstanceError):
            manager.submit_step(sid, 42, 8, 8, 1, 0)

    def test_storage_pose_recorded_verbatim(self):
        storage = storage_with(("2x4_red", 0, 0, 1, 180))
        manager = SessionManager()
        sid = manager.create_session(CATALOG, storage)
        feedback = manager.submit_step(sid, 1, 8, 8, 1, 270)
        assert feedback.accepted
        assert feedback.node.storage_pose.rot == 180
        assert feedback.node.assembly_pose.rot == 270


class TestSubmitFrames:
    def test_frame_driven_session_matches_direct_learner(self):
        rng = random.Random(700)
        graph, storage = random_script(rng, CATALOG, DIMS, n_bricks=4)
        frames = render_script(graph, storage, resolution=2, seed=3)
        manager = SessionManager()
        sid = manager.create_session(CATALOG, storage)
        feedback = manager.submit_frames(sid, frames)
        assert feedback.graph_length == 4
        direct = learn(detect_scene_keyframes(frames, k=3), CATALOG, plate_height=DIMS[2])
        assert manager.get_graph(sid) == direct == graph

    def test_incremental_batches_equal_one_shot(self):
        rng = random.Random(701)
        graph, storage = random_script(rng, CATALOG, DIMS, n_bricks=5)
        frames = render_script(graph, storage, resolution=2, seed=4)
        manager = SessionManager()
        one = manager.create_session(CATALOG, storage)
        manager.submit_frames(one, frames)
        two = manager.create_session(CATALOG, storage)
        third = len(frames) // 3
        manager.submit_frames(two, frames[:third])
        manager.submit_frames(two, frames[third : 2 * third])
        manager.submit_frames(two, frames[2 * third :])
        assert manager.get_graph(one) == manager.get_graph(two) == graph

    def test_mixed_input_paths_rejected(self):
        rng = random.Random(702)
        graph, storage = random_script(rng, CATALOG, DIMS, n_bricks=2)
        frames = render_script(graph, storage, resolution=2, seed=5)
        manager = SessionManager()
        sid = manager.create_session(CATALOG, storage)
        first = storage.placements[sorted(storage.placements)[0]]
        manager.submit_step(sid, first.instance_id, 10, 10, 1, 0)
        with pytest.raises(DemonstrationError):
            manager.submit_frames(sid, frames)

    def test_wrong_layout_detected_at_first_keyframe(self):
        rng = random.Random(703)
        graph, storage = random_script(rng, CATALOG, DIMS, n_bricks=2)
        frames = render_script(graph, storage, resolution=2, seed=6)
        other = storage_with(("2x6_white", 3, 3, 1, 0))
        manager = SessionManager()
        sid = manager.create_session(CATALOG, other)
        with pytest.raises(DemonstrationError):
            manager.submit_frames(sid, frames)


class TestVerify:
    def test_demonstrated_tower_verifies_operable(self):
        manager, sid = fresh()
        manager.submit_step(sid, 1, 8, 8, 1, 0)
        manager.submit_step(sid, 2, 8, 8, 2, 0)
        manager.submit_step(sid, 3, 8, 8, 3, 0)
        trip = manager.verify(sid)
        assert trip.operable
        assert manager.get(sid).status == "done"
        assert manager.get_report(sid) is trip
        # Live states are untouched by verification.
        assert len(manager.get(sid).assembly_state.placements) == 3

    def test_verify_before_any_step(self):
        manager, sid = fresh()
        with pytest.raises(EmptyGraphError):
            manager.verify(sid)

    def test_step_equivalence_with_learner_path(self):
        # The same demonstration through steps and through frames must
        # produce field-identical graphs.
        rng = random.Random(704)
        graph, storage = random_script(rng, CATALOG, DIMS, n_bricks=4)
        manager = SessionManager()
        by_steps = manager.create_session(CATALOG, storage)
        for node in graph.nodes:
            source = next(
                iid
                for iid, p in sorted(manager.get(by_steps).storage_state.placements.items())
                if p.type_id == node.brick_type
                and (p.x, p.y, p.z) == (node.storage_pose.x, node.storage_pose.y, node.storage_pose.z)
            )
            pose = node.assembly_pose
            assert manager.submit_step(by_steps, source, pose.x, pose.y, pose.z, pose.rot).accepted
        by_frames = manager.create_session(CATALOG, storage)
        manager.submit_frames(by_frames, render_script(graph, storage, resolution=2, seed=8))
        assert serialize(manager.get_graph(by_steps)) == serialize(manager.get_graph(by_frames))


class TestPersistence:
    def test_save_load_save_is_byte_identical(self, tmp_path):
        rng = random.Random(705)
        graph, storage = random_script(rng, CATALOG, DIMS, n_bricks=3)
        manager = SessionManager()
        sid = manager.create_session(CATALOG, storage)
        manager.submit_frames(sid, render_script(graph, storage, resolution=2, seed=9))
        manager.verify(sid)
        first = tmp_path / "first"
        manager.save_session(sid, first)

        loader = SessionManager()
        reloaded = loader.load_session(first)
        assert reloaded == sid
        second = tmp_path / "second"
        loader.save_session(reloaded, second)
        for name in sorted(p.name for p in first.iterdir()):
            assert (second / name).read_bytes() == (first / name).read_bytes(), name

    def test_loaded_session_reproduces_report(self, tmp_path):
        manager, sid = fresh()
        manager.submit_step(sid, 1, 8, 8, 1, 0)
        trip = manager.verify(sid)
        manager.save_session(sid, tmp_path / "s")
        loader = SessionManager()
        loader.load_session(tmp_path / "s")
        again = loader.get_report(sid)
        assert again is not None
        assert again.forward.render() == trip.forward.render()
        assert again.reverse.render() == trip.reverse.render()

    def test_loaded_session_accepts_more_steps(self, tmp_path):
        manager, sid = fresh()
        manager.submit_step(sid, 1, 8, 8, 1, 0)
        manager.save_session(sid, tmp_path / "s")
        loader = SessionManager()
        loader.load_session(tmp_path / "s")
        session = loader.get(sid)
        remaining = sorted(session.storage_state.placements)
        feedback = loader.submit_step(sid, remaining[0], 8, 8, 2, 0)
        assert feedback.accepted
        assert feedback.graph_length == 2
