"""Batch front door: verify, learn, plan, replay, render, serve.

Every subcommand is a thin shell over the library; outputs are byte
identical to direct API use. Exit codes: 0 success (or operable verdict),
2 negative verdict (structure rejected, graph inoperable, no plan,
demonstration unexplainable), 1 file or usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config, reach_from, tool_from
from .demogen import render_script
from .errors import (
    BrickworksError,
    DemonstrationError,
    InfeasibleTargetError,
    ParseError,
)
from .feasibility import check_structure
from .learner import learn
from .perception import (
    DEFAULT_RESOLUTION,
    DEFAULT_STABILITY_WINDOW,
    detect_scene_keyframes,
    dump_demo,
    parse_demo,
)
from .sequencer import SequencingProblem, auto_storage_for, find_order
from .service import SessionManager
from .taskgraph import ASSEMBLY_DIR, parse, serialize, synth_storage, validate
from .twin import execute, verify_roundtrip
from .world import Catalog, parse_catalog, parse_structure

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REJECTED = 2


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _catalog(args: argparse.Namespace) -> Catalog:
    if args.catalog:
        return parse_catalog(_read(args.catalog))
    return Catalog.default()


def _tool_and_reach(args: argparse.Namespace, dims):
    config = load_config(args.config)
    tool = tool_from(
        config,
        margin=args.tool_margin,
        body_height=args.tool_height,
        tool_length=args.tool_length,
    )
    rect = None
    if args.reach:
        parts = args.reach.replace(",", " ").split()
        if len(parts) != 4:
            raise ParseError(f"--reach needs 'x0,y0,x1,y1', got {args.reach!r}", 0)
        rect = tuple(int(v) for v in parts)
    reach = reach_from(config, dims, rect=rect, max_height=args.reach_height)
    return tool, reach


def cmd_verify(args: argparse.Namespace) -> int:
    catalog = _catalog(args)
    state = parse_structure(_read(args.structure), catalog)
    verdict = check_structure(state)
    if verdict.ok:
        print(f"ok: {len(state.placements)} bricks, structure is buildable")
        return EXIT_OK
    for v in verdict.violations:
        print(f"{v.code} instance {v.instance_id}: {v.detail}")
    return EXIT_REJECTED


def cmd_learn(args: argparse.Namespace) -> int:
    catalog = _catalog(args)
    frames = parse_demo(_read(args.demo))
    keyframes = detect_scene_keyframes(frames, args.stability_window)
    try:
        graph = learn(keyframes, catalog, plate_height=args.plate_height)
    except DemonstrationError as exc:
        print(f"demonstration rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    _write(args.output, serialize(graph))
    print(f"learned {len(graph)} steps from {len(keyframes)} keyframes", file=sys.stderr)
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    catalog = _catalog(args)
    target = parse_structure(_read(args.structure), catalog)
    if args.storage:
        storage = parse_structure(_read(args.storage), catalog, workspace_id="storage")
    else:
        storage = auto_storage_for(target)
    tool, reach = _tool_and_reach(args, target.dims)
    problem = SequencingProblem(target, storage, tool, reach)
    try:
        graph = find_order(problem, limit=args.budget)
    except InfeasibleTargetError as exc:
        print(f"target is not buildable: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    if graph is None:
        print("no operable assembly order exists", file=sys.stderr)
        return EXIT_REJECTED
    _write(args.output, serialize(graph))
    print(f"planned {len(graph)} steps", file=sys.stderr)
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    catalog = _catalog(args)
    graph = parse(_read(args.graph))
    if args.layout:
        storage = parse_structure(_read(args.layout), catalog, workspace_id="storage")
    else:
        storage = synth_storage(graph, catalog, (args.plate_size, args.plate_size, args.plate_height))
    tool, reach = _tool_and_reach(args, storage.dims)
    if args.roundtrip:
        if graph.direction != ASSEMBLY_DIR:
            print("round trips need an assembly-direction graph", file=sys.stderr)
            return EXIT_ERROR
        trip = verify_roundtrip(graph, storage, tool, reach)
        text = trip.forward.render() + trip.reverse.render()
        operable = trip.operable
    else:
        report = execute(graph, storage, tool, reach)
        text = report.render()
        operable = report.operable
    _write(args.output, text)
    if args.output:
        print("operable" if operable else "inoperable", file=sys.stderr)
    return EXIT_OK if operable else EXIT_REJECTED


def cmd_render(args: argparse.Namespace) -> int:
    catalog = _catalog(args)
    graph = parse(_read(args.graph))
    if args.layout:
        storage = parse_structure(_read(args.layout), catalog, workspace_id="storage")
    else:
        storage = synth_storage(graph, catalog, (args.plate_size, args.plate_size, args.plate_height))
    verdict = validate(graph, catalog, storage.dims)
    if not verdict.ok:
        print("graph is not structurally replayable; cannot render", file=sys.stderr)
        return EXIT_REJECTED
    frames = render_script(
        graph,
        storage,
        resolution=args.resolution,
        stability_window=args.stability_window,
        junk_frames=args.junk_frames,
        noise_fraction=args.noise,
        seed=args.seed,
    )
    _write(args.output, dump_demo(frames))
    print(f"rendered {len(frames)} frames", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    studio = args.studio_dir if args.studio_dir and Path(args.studio_dir).is_dir() else None
    app = create_app(SessionManager(), studio_dir=studio)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brickworks",
        description="Learn, verify, plan, and replay brick assembly task graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, tool_flags: bool = True) -> None:
        p.add_argument("--catalog", help="catalog file (default: stock catalog)")
        p.add_argument("--config", help="flat key = value config file")
        if tool_flags:
            p.add_argument("--tool-margin", type=int, default=None, help="tool lateral margin in studs")
            p.add_argument("--tool-height", type=int, default=None, help="tool body height in layers")
            p.add_argument("--tool-length", type=int, default=None, help="tool shaft length in layers")
            p.add_argument("--reach", default=None, help="reach rectangle x0,y0,x1,y1 for both plates")
            p.add_argument("--reach-height", type=int, default=None, help="reach ceiling in layers")

    p = sub.add_parser("verify", help="check a structure file for buildability")
    p.add_argument("structure")
    common(p, tool_flags=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("learn", help="learn a task graph from a demo log")
    p.add_argument("demo")
    p.add_argument("-o", "--output", help="task-graph file (default: stdout)")
    p.add_argument("--stability-window", type=int, default=DEFAULT_STABILITY_WINDOW)
    p.add_argument("--plate-height", type=int, default=16)
    common(p, tool_flags=False)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("plan", help="search an operable assembly order for a structure")
    p.add_argument("structure")
    p.add_argument("-o", "--output", help="task-graph file (default: stdout)")
    p.add_argument("--storage", help="storage layout file (default: auto-parked bricks)")
    p.add_argument("--budget", type=int, default=500_000, help="search expansion budget")
    common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("replay", help="execute a task graph in the digital twin")
    p.add_argument("graph")
    p.add_argument("-o", "--output", help="report file (default: stdout)")
    p.add_argument("--layout", help="initial storage layout (default: implied by the graph)")
    p.add_argument("--roundtrip", action="store_true", help="also replay the reverse graph")
    p.add_argument("--plate-size", type=int, default=48)
    p.add_argument("--plate-height", type=int, default=16)
    common(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("render", help="render a task graph into a synthetic demo log")
    p.add_argument("graph")
    p.add_argument("-o", "--output", help="demo log file (default: stdout)")
    p.add_argument("--layout", help="initial storage layout (default: implied by the graph)")
    p.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    p.add_argument("--stability-window", type=int, default=DEFAULT_STABILITY_WINDOW)
    p.add_argument("--junk-frames", type=int, default=1, help="occluded frames between periods")
    p.add_argument("--noise", type=float, default=0.0, help="fraction of corrupted pixels per cell")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plate-size", type=int, default=48)
    p.add_argument("--plate-height", type=int, default=16)
    common(p, tool_flags=False)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8377)
    p.add_argument("--studio-dir", help="static studio bundle to mount at /studio")
    common(p, tool_flags=False)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except BrickworksError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
