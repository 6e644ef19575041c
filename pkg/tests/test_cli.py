"""CLI subcommands: exit codes, file outputs, end-to-end pipelines."""

from __future__ import annotations

import random

import pytest

from brickworks.cli import main
from brickworks.demogen import random_script
from brickworks.scenarios import (
    tight_gap_middle_last,
    tight_gap_storage,
    tight_gap_target,
    unsupported_bridge_states,
)
from brickworks.taskgraph import parse, serialize
from brickworks.world import Catalog, dump_structure

CATALOG = Catalog.default()


@pytest.fixture()
def bridge_files(tmp_path):
    bad, good = unsupported_bridge_states()
    bad_path = tmp_path / "bridge_bad.bricks"
    good_path = tmp_path / "bridge_good.bricks"
    bad_path.write_text(dump_structure(bad))
    good_path.write_text(dump_structure(good))
    return bad_path, good_path


class TestVerify:
    def test_unsupported_structure_exits_2(self, bridge_files, capsys):
        bad_path, _ = bridge_files
        assert main(["verify", str(bad_path)]) == 2
        out = capsys.readouterr().out
        assert "UNSUPPORTED" in out

    def test_supported_variant_exits_0(self, bridge_files):
        _, good_path = bridge_files
        assert main(["verify", str(good_path)]) == 0

    def test_missing_file_exits_1(self, capsys):
        assert main(["verify", "no_such_file.bricks"]) == 1
        assert "error" in capsys.readouterr().err

    def test_parse_error_exits_1(self, tmp_path, capsys):
        path = tmp_path / "broken.bricks"
        path.write_text("bricks v1 8 8\n")
        assert main(["verify", str(path)]) == 1


class TestPipeline:
    def test_render_learn_replay_round_trip(self, tmp_path):
        rng = random.Random(900)
        graph, storage = random_script(rng, CATALOG, (16, 16, 8), n_bricks=4)
        graph_path = tmp_path / "build.task"
        layout_path = tmp_path / "storage.bricks"
        graph_path.write_text(serialize(graph))
        layout_path.write_text(dump_structure(storage))

        demo_path = tmp_path / "demo.log"
        assert main(
            [
                "render", str(graph_path), "--layout", str(layout_path),
                "--resolution", "2", "-o", str(demo_path),
            ]
        ) == 0

        learned_path = tmp_path / "learned.task"
        assert main(["learn", str(demo_path), "-o", str(learned_path), "--plate-height", "8"]) == 0
        assert parse(learned_path.read_text()) == graph

        report_path = tmp_path / "report.txt"
        assert main(
            [
                "replay", str(learned_path), "--layout", str(layout_path),
                "-o", str(report_path), "--roundtrip",
            ]
        ) == 0
        assert report_path.read_text().startswith("report v1 ")

    def test_replay_middle_last_exits_2(self, tmp_path):
        graph_path = tmp_path / "middle_last.task"
        layout_path = tmp_path / "towers.bricks"
        graph_path.write_text(serialize(tight_gap_middle_last()))
        layout_path.write_text(dump_structure(tight_gap_storage()))
        report_path = tmp_path / "report.txt"
        code = main(
            ["replay", str(graph_path), "--layout", str(layout_path), "-o", str(report_path)]
        )
        assert code == 2
        assert "NO_TOP_CLEARANCE" in report_path.read_text()

    def test_replay_default_layout_is_implied_by_graph(self, tmp_path):
        rng = random.Random(901)
        graph, storage = random_script(rng, CATALOG, (16, 16, 8), n_bricks=3)
        graph_path = tmp_path / "build.task"
        graph_path.write_text(serialize(graph))
        assert main(["replay", str(graph_path), "--plate-size", "16", "--plate-height", "8"]) == 0

    def test_plan_tower_fixture(self, tmp_path):
        target_path = tmp_path / "target.bricks"
        storage_path = tmp_path / "storage.bricks"
        target_path.write_text(dump_structure(tight_gap_target()))
        storage_path.write_text(dump_structure(tight_gap_storage()))
        plan_path = tmp_path / "plan.task"
        assert main(
            ["plan", str(target_path), "--storage", str(storage_path), "-o", str(plan_path)]
        ) == 0
        planned = parse(plan_path.read_text())
        assert main(
            ["replay", str(plan_path), "--layout", str(storage_path)]
        ) == 0
        assert len(planned) == 7

    def test_plan_infeasible_target_exits_2(self, tmp_path, capsys):
        target_path = tmp_path / "floating.bricks"
        target_path.write_text("bricks v1 8 8 4\n2x2_red 0 0 1 0\n2x2_blue 4 4 3 0\n")
        assert main(["plan", str(target_path)]) == 2

    def test_learn_garbage_demo_exits_2(self, tmp_path):
        # A demo whose storage loses two bricks at once cannot be explained.
        rng = random.Random(902)
        graph, storage = random_script(rng, CATALOG, (16, 16, 8), n_bricks=2)
        from brickworks.demogen import render_script
        from brickworks.perception import dump_demo, parse_demo

        frames = render_script(graph, storage, resolution=2, seed=13)
        # Drop the middle stable period so two moves collapse into one diff.
        keep = [f for f in frames if not (400 <= f.timestamp < 800)]
        demo_path = tmp_path / "demo.log"
        demo_path.write_text(dump_demo(keep))
        code = main(["learn", str(demo_path), "-o", str(tmp_path / "out.task"), "--plate-height", "8"])
        assert code == 2


class TestDeterminism:
    def test_repeated_runs_are_byte_identical(self, tmp_path):
        rng = random.Random(903)
        graph, storage = random_script(rng, CATALOG, (16, 16, 8), n_bricks=4)
        graph_path = tmp_path / "build.task"
        layout_path = tmp_path / "storage.bricks"
        graph_path.write_text(serialize(graph))
        layout_path.write_text(dump_structure(storage))

        outputs = []
        for attempt in ("a", "b"):
            demo = tmp_path / f"demo_{attempt}.log"
            learned = tmp_path / f"learned_{attempt}.task"
            report = tmp_path / f"report_{attempt}.txt"
            assert main(["render", str(graph_path), "--layout", str(layout_path),
                         "--resolution", "2", "--noise", "0.1", "-o", str(demo)]) == 0
            assert main(["learn", str(demo), "-o", str(learned), "--plate-height", "8"]) == 0
            assert main(["replay", str(learned), "--layout", str(layout_path),
                         "-o", str(report), "--roundtrip"]) == 0
            outputs.append((demo.read_bytes(), learned.read_bytes(), report.read_bytes()))
        assert outputs[0] == outputs[1]
