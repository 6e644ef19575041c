"""HTTP surface of the engine: JSON bodies over the session manager.

Status codes: 200 ok, 400 malformed input, 404 unknown session, 409
rejected step (violations in the body), 422 demonstration error. Error
bodies carry {code, message, step_or_frame_index}.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import (
    BrickworksError,
    DemonstrationError,
    EmptyGraphError,
    InvalidLayoutError,
    ParseError,
    UnknownInstanceError,
    UnknownSessionError,
)
from .manipulation import ToolProfile
from .perception import parse_demo
from .service import SessionManager
from .taskgraph import serialize
from .twin import ReachEnvelope, RoundTrip
from .world import (
    BACKGROUND_COLOR,
    PALETTE,
    Catalog,
    WorkspaceState,
    parse_catalog,
    parse_structure,
)


class ToolParams(BaseModel):
    margin: int = 1
    body_height: int = 4
    tool_length: int = 8


class ReachParams(BaseModel):
    storage_rect: tuple[int, int, int, int]
    assembly_rect: tuple[int, int, int, int]
    max_reach_height: int = 64


class CreateSessionRequest(BaseModel):
    catalog: str | None = None
    storage: str | None = None
    tool: ToolParams | None = None
    reach: ReachParams | None = None
    stability_window: int = 3


class StepRequest(BaseModel):
    instance_id: int
    x: int
    y: int
    z: int
    rot: int


class FramesRequest(BaseModel):
    demo_log: str


def _error_body(code: str, message: str, index: int | None = None) -> dict:
    return {"code": code, "message": message, "step_or_frame_index": index}


def _placements(state: WorkspaceState) -> list[dict]:
    out = []
    for instance_id in sorted(state.placements):
        p = state.placements[instance_id]
        bt = state.catalog[p.type_id]
        out.append(
            {
                "instance_id": instance_id,
                "type_id": p.type_id,
                "x": p.x,
                "y": p.y,
                "z": p.z,
                "rot": p.rot,
                "width": bt.width,
                "length": bt.length,
                "color": bt.color,
            }
        )
    return out


def _graph_payload(graph) -> dict:
    return {
        "direction": graph.direction,
        "length": len(graph.nodes),
        "nodes": [
            {
                "index": n.index,
                "brick_type": n.brick_type,
                "storage_pose": [n.storage_pose.x, n.storage_pose.y, n.storage_pose.z, n.storage_pose.rot],
                "assembly_pose": [n.assembly_pose.x, n.assembly_pose.y, n.assembly_pose.z, n.assembly_pose.rot],
            }
            for n in graph.nodes
        ],
        "text": serialize(graph),
    }


def _report_payload(trip: RoundTrip) -> dict:
    return {
        "operable": trip.operable,
        "forward": trip.forward.as_dict(),
        "reverse": trip.reverse.as_dict(),
        "forward_text": trip.forward.render(),
        "reverse_text": trip.reverse.render(),
    }


def create_app(
    manager: SessionManager | None = None, studio_dir: str | Path | None = None
) -> FastAPI:
    manager = manager if manager is not None else SessionManager()
    app = FastAPI(title="brickworks", docs_url=None, redoc_url=None)
    app.state.manager = manager

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content=_error_body("MALFORMED", str(exc.errors()[:3])),
        )

    @app.exception_handler(UnknownSessionError)
    async def unknown_session(request: Request, exc: UnknownSessionError):
        return JSONResponse(status_code=404, content=_error_body("UNKNOWN_SESSION", str(exc)))

    @app.exception_handler(DemonstrationError)
    async def demonstration_error(request: Request, exc: DemonstrationError):
        return JSONResponse(
            status_code=422,
            content=_error_body(type(exc).__name__, str(exc), exc.keyframe_index),
        )

    @app.exception_handler(EmptyGraphError)
    async def empty_graph(request: Request, exc: EmptyGraphError):
        return JSONResponse(status_code=422, content=_error_body("EMPTY_GRAPH", str(exc)))

    @app.exception_handler(ParseError)
    async def parse_error(request: Request, exc: ParseError):
        return JSONResponse(
            status_code=400, content=_error_body("PARSE_ERROR", str(exc), exc.line)
        )

    @app.exception_handler(BrickworksError)
    async def engine_error(request: Request, exc: BrickworksError):
        return JSONResponse(status_code=400, content=_error_body(type(exc).__name__, str(exc)))

    @app.get("/catalog")
    def get_catalog():
        catalog = Catalog.default()
        return {
            "types": [
                {"type_id": t.type_id, "width": t.width, "length": t.length, "color": t.color}
                for t in catalog
            ],
            "palette": [{"name": name, "rgb": rgb} for name, rgb in PALETTE],
            "background": BACKGROUND_COLOR,
        }

    @app.post("/sessions")
    def create_session(body: CreateSessionRequest):
        catalog = parse_catalog(body.catalog) if body.catalog else Catalog.default()
        storage = (
            parse_structure(body.storage, catalog, workspace_id="storage")
            if body.storage
            else None
        )
        tool = ToolProfile(**body.tool.model_dump()) if body.tool else None
        reach = (
            ReachEnvelope(
                tuple(body.reach.storage_rect),
                tuple(body.reach.assembly_rect),
                body.reach.max_reach_height,
            )
            if body.reach
            else None
        )
        try:
            session_id = manager.create_session(
                catalog=catalog,
                storage=storage,
                tool=tool,
                reach=reach,
                stability_window=body.stability_window,
            )
        except InvalidLayoutError as exc:
            return JSONResponse(
                status_code=400, content=_error_body("INVALID_LAYOUT", str(exc))
            )
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = manager.get(session_id)
        w, l, h = session.initial_storage.dims
        return {
            "session_id": session.session_id,
            "status": session.status,
            "dims": [w, l, h],
            "stability_window": session.stability_window,
            "graph_length": len(session.nodes),
            "storage": _placements(session.storage_state),
            "assembly": _placements(session.assembly_state),
            "initial_storage": _placements(session.initial_storage),
            "has_report": session.roundtrip is not None,
        }

    @app.post("/sessions/{session_id}/steps")
    def submit_step(session_id: str, body: StepRequest):
        try:
            feedback = manager.submit_step(
                session_id, body.instance_id, body.x, body.y, body.z, body.rot
            )
        except UnknownInstanceError as exc:
            return JSONResponse(
                status_code=409,
                content={
                    "accepted": False,
                    "violations": [
                        {"code": "UNKNOWN_INSTANCE", "detail": str(exc), "cells": []}
                    ],
                    "graph_length": len(manager.get(session_id).nodes),
                },
            )
        if not feedback.accepted:
            return JSONResponse(
                status_code=409,
                content={
                    "accepted": False,
                    "violations": feedback.violation_dicts(),
                    "graph_length": feedback.graph_length,
                },
            )
        node = feedback.node
        assert node is not None
        return {
            "accepted": True,
            "violations": [],
            "graph_length": feedback.graph_length,
            "node": {
                "index": node.index,
                "brick_type": node.brick_type,
                "storage_pose": [node.storage_pose.x, node.storage_pose.y, node.storage_pose.z, node.storage_pose.rot],
                "assembly_pose": [node.assembly_pose.x, node.assembly_pose.y, node.assembly_pose.z, node.assembly_pose.rot],
            },
        }

    @app.post("/sessions/{session_id}/frames")
    def submit_frames(session_id: str, body: FramesRequest):
        frames = parse_demo(body.demo_log)
        feedback = manager.submit_frames(session_id, frames)
        return {
            "keyframe_count": feedback.keyframe_count,
            "graph_length": feedback.graph_length,
            "new_nodes": [
                {
                    "index": n.index,
                    "brick_type": n.brick_type,
                    "storage_pose": [n.storage_pose.x, n.storage_pose.y, n.storage_pose.z, n.storage_pose.rot],
                    "assembly_pose": [n.assembly_pose.x, n.assembly_pose.y, n.assembly_pose.z, n.assembly_pose.rot],
                }
                for n in feedback.new_nodes
            ],
        }

    @app.post("/sessions/{session_id}/verify")
    def verify(session_id: str):
        trip = manager.verify(session_id)
        return _report_payload(trip)

    @app.get("/sessions/{session_id}/taskgraph")
    def get_taskgraph(session_id: str):
        return _graph_payload(manager.get_graph(session_id))

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str):
        trip = manager.get_report(session_id)
        if trip is None:
            return JSONResponse(
                status_code=404,
                content=_error_body("NO_REPORT", "session has not been verified"),
            )
        return _report_payload(trip)

    if studio_dir is not None and Path(studio_dir).is_dir():
        app.mount("/studio", StaticFiles(directory=str(studio_dir), html=True), name="studio")

    return app
