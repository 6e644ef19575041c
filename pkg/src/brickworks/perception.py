"""Deterministic camera stand-in: rendering, pixel-to-grid, keyframes, demo logs.

A snapshot is a top-down per-pixel height and color image of one plate at
``resolution`` pixels per stud. Only top surfaces are visible; occluded
bricks are recovered downstream by the learner from keyframe history.
Classification is median (heights) and majority-nearest-palette (colors)
per stud cell, which absorbs moderate per-pixel noise and keeps the whole
pipeline deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatchError, EmptyStreamError, ParseError
from .world import (
    ASSEMBLY,
    BACKGROUND_COLOR,
    COLOR_INDEX,
    PALETTE,
    STORAGE,
    WorkspaceState,
    footprint_cells,
)

DEFAULT_RESOLUTION = 4
DEFAULT_STABILITY_WINDOW = 3

_PALETTE_RGB = np.array(
    [[(rgb >> 16) & 0xFF, (rgb >> 8) & 0xFF, rgb & 0xFF] for _, rgb in PALETTE],
    dtype=np.int64,
)
_PALETTE_VALUES = np.array([rgb for _, rgb in PALETTE], dtype=np.uint32)


@dataclass(frozen=True, eq=False)
class Snapshot:
    """Per-pixel heights (layers, real-valued) and 24-bit colors of one plate."""

    timestamp: int
    workspace_id: str
    heights: np.ndarray
    colors: np.ndarray
    resolution: int

    def __post_init__(self) -> None:
        if self.resolution < 1:
            raise ValueError("resolution must be >= 1 pixel per stud")
        if self.heights.shape != self.colors.shape or self.heights.ndim != 2:
            raise DimensionMismatchError(
                f"height/color arrays disagree: {self.heights.shape} vs {self.colors.shape}"
            )


@dataclass(frozen=True, eq=False)
class GridObservation:
    """Per-cell top height (integer layers) and top color (palette index, -1 = background)."""

    workspace_id: str
    heights: np.ndarray
    colors: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridObservation):
            return NotImplemented
        return (
            self.workspace_id == other.workspace_id
            and np.array_equal(self.heights, other.heights)
            and np.array_equal(self.colors, other.colors)
        )

    def key(self) -> tuple:
        """Hashable identity for run detection."""
        return (self.workspace_id, self.heights.tobytes(), self.colors.tobytes())

    @property
    def dims_wl(self) -> tuple[int, int]:
        return self.heights.shape  # type: ignore[return-value]


class SceneObservation(NamedTuple):
    """Paired observation of both plates at one stable moment."""

    storage: GridObservation
    assembly: GridObservation

    def key(self) -> tuple:
        return (self.storage.key(), self.assembly.key())


def top_surface(state: WorkspaceState) -> tuple[np.ndarray, np.ndarray]:
    """Topmost occupied layer and its palette color index per column.

    Returns (heights, colors): (W, L) int16 arrays, colors -1 where empty.
    """
    w, l, _ = state.dims
    heights = np.zeros((w, l), dtype=np.int16)
    colors = np.full((w, l), -1, dtype=np.int16)
    for p in state.placements.values():
        color_index = COLOR_INDEX[state.catalog[p.type_id].color]
        for (x, y, z) in footprint_cells(p, state.catalog):
            if z > heights[x, y]:
                heights[x, y] = z
                colors[x, y] = color_index
    return heights, colors


def render(state: WorkspaceState, resolution: int = DEFAULT_RESOLUTION, timestamp: int = 0) -> Snapshot:
    """Noiseless top-down snapshot of the state's visible surface."""
    heights, colors = top_surface(state)
    rgb = np.where(colors >= 0, _PALETTE_VALUES[np.clip(colors, 0, None)], np.uint32(BACKGROUND_COLOR))
    px_h = np.repeat(np.repeat(heights.astype(np.float64), resolution, axis=0), resolution, axis=1)
    px_c = np.repeat(np.repeat(rgb.astype(np.uint32), resolution, axis=0), resolution, axis=1)
    return Snapshot(timestamp, state.workspace_id, px_h, px_c, resolution)


def _classify_colors(colors: np.ndarray) -> np.ndarray:
    """Nearest palette index per pixel by squared RGB distance."""
    flat = colors.astype(np.int64).ravel()
    rgb = np.stack([(flat >> 16) & 0xFF, (flat >> 8) & 0xFF, flat & 0xFF], axis=1)
    dists = ((rgb[:, None, :] - _PALETTE_RGB[None, :, :]) ** 2).sum(axis=2)
    return dists.argmin(axis=1).reshape(colors.shape)


def pixel_to_grid(snapshot: Snapshot) -> GridObservation:
    """Collapse a snapshot to per-cell heights and colors.

    Heights: median of the cell's pixels, rounded half up. Colors: the
    majority nearest-palette label among the cell's pixels, ties broken
    by the lowest palette index; cells with height 0 are background.
    """
    r = snapshot.resolution
    ph, pw = snapshot.heights.shape
    if ph % r or pw % r:
        raise DimensionMismatchError(
            f"pixel array {ph}x{pw} is not a multiple of resolution {r}"
        )
    w, l = ph // r, pw // r
    blocks_h = snapshot.heights.reshape(w, r, l, r)
    median = np.median(blocks_h, axis=(1, 3))
    heights = np.floor(median + 0.5).astype(np.int16)
    heights = np.maximum(heights, 0)

    labels = _classify_colors(snapshot.colors).reshape(w, r, l, r)
    colors = np.full((w, l), -1, dtype=np.int16)
    for cx in range(w):
        for cy in range(l):
            if heights[cx, cy] <= 0:
                continue
            votes = np.bincount(labels[cx, :, cy, :].ravel(), minlength=len(PALETTE))
            colors[cx, cy] = int(votes.argmax())
    return GridObservation(snapshot.workspace_id, heights, colors)


def detect_keyframes(stream: Sequence[Snapshot], k: int = DEFAULT_STABILITY_WINDOW) -> list[GridObservation]:
    """Stable observations of a single-workspace snapshot stream.

    A keyframe is the observation of a maximal run of at least ``k``
    consecutive frames with identical grid observations; consecutive
    duplicate keyframes collapse to one. Transient frames (a hand over
    the plate, mid-motion blur) never survive.
    """
    if k < 2:
        raise ValueError("stability window must be >= 2 frames")
    if not stream:
        raise EmptyStreamError("no frames to scan for keyframes")
    workspaces = {s.workspace_id for s in stream}
    if len(workspaces) != 1:
        raise ValueError(f"stream mixes workspaces {sorted(workspaces)}")
    _check_time_ordered(stream)
    observations = [pixel_to_grid(s) for s in stream]
    return _stable_runs(observations, k)


def detect_scene_keyframes(
    frames: Sequence[Snapshot], k: int = DEFAULT_STABILITY_WINDOW
) -> list[SceneObservation]:
    """Stable paired (storage, assembly) observations of a mixed frame stream.

    Each frame updates the latest observation of its workspace; once both
    plates have been seen, every frame contributes one combined scene to
    the run detection. Stability therefore requires both plates quiet.
    """
    if k < 2:
        raise ValueError("stability window must be >= 2 frames")
    if not frames:
        raise EmptyStreamError("no frames to scan for keyframes")
    _check_time_ordered(frames)
    latest: dict[str, GridObservation] = {}
    scenes: list[SceneObservation] = []
    for frame in frames:
        latest[frame.workspace_id] = pixel_to_grid(frame)
        if STORAGE in latest and ASSEMBLY in latest:
            scenes.append(SceneObservation(latest[STORAGE], latest[ASSEMBLY]))
    return _stable_runs(scenes, k)


def _check_time_ordered(frames: Sequence[Snapshot]) -> None:
    for a, b in zip(frames, frames[1:]):
        if b.timestamp < a.timestamp:
            raise ValueError(
                f"frames out of order: {b.timestamp}ms after {a.timestamp}ms"
            )


def _stable_runs(items: list, k: int) -> list:
    runs: list[tuple[object, int]] = []
    for item in items:
        if runs and runs[-1][0].key() == item.key():
            runs[-1] = (runs[-1][0], runs[-1][1] + 1)
        else:
            runs.append((item, 1))
    stable = [item for item, count in runs if count >= k]
    collapsed: list = []
    for item in stable:
        if not collapsed or collapsed[-1].key() != item.key():
            collapsed.append(item)
    return collapsed


# --- demonstration log format ---


def dump_demo(frames: Sequence[Snapshot]) -> str:
    """Serialize frames to the demo log format.

    Header ``demo v1 <r> <W> <L>``; each frame is a ``frame <ts> <workspace>``
    line followed by r*L rows of r*W ``height:colorhex`` tokens (row j holds
    pixels (i, j) for i across the plate width).
    """
    if not frames:
        raise ValueError("cannot dump an empty demonstration")
    r = frames[0].resolution
    pw, pl = frames[0].heights.shape
    w, l = pw // r, pl // r
    lines = [f"demo v1 {r} {w} {l}"]
    for frame in frames:
        if frame.resolution != r or frame.heights.shape != (pw, pl):
            raise DimensionMismatchError("all frames must share resolution and dims")
        lines.append(f"frame {frame.timestamp} {frame.workspace_id}")
        for j in range(pl):
            row = " ".join(
                f"{frame.heights[i, j]:g}:{int(frame.colors[i, j]):06X}"
                for i in range(pw)
            )
            lines.append(row)
    return "\n".join(lines) + "\n"


def parse_demo(text: str) -> list[Snapshot]:
    lines = text.splitlines()
    if not lines:
        raise ParseError("missing 'demo v1 <r> <W> <L>' header", 1)
    parts = lines[0].split()
    if len(parts) != 5 or parts[0] != "demo" or parts[1] != "v1":
        raise ParseError(f"expected 'demo v1 <r> <W> <L>', got {lines[0]!r}", 1)
    try:
        r, w, l = int(parts[2]), int(parts[3]), int(parts[4])
    except ValueError:
        raise ParseError(f"bad header numbers in {lines[0]!r}", 1) from None
    if r < 1 or w < 1 or l < 1:
        raise ParseError("resolution and dims must be positive", 1)
    frames: list[Snapshot] = []
    pw, pl = r * w, r * l
    i = 1
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        parts = lines[i].split()
        if parts[0] != "frame" or len(parts) != 3:
            raise ParseError(f"expected 'frame <ts> <workspace>', got {lines[i]!r}", i + 1)
        try:
            timestamp = int(parts[1])
        except ValueError:
            raise ParseError(f"bad timestamp {parts[1]!r}", i + 1) from None
        workspace_id = parts[2]
        if i + pl >= len(lines):
            raise ParseError(f"frame truncated: expected {pl} pixel rows", i + 1)
        heights = np.zeros((pw, pl), dtype=np.float64)
        colors = np.zeros((pw, pl), dtype=np.uint32)
        for j in range(pl):
            lineno = i + 1 + j
            tokens = lines[lineno].split()
            if len(tokens) != pw:
                raise ParseError(
                    f"expected {pw} pixel tokens, got {len(tokens)}", lineno + 1
                )
            for px, token in enumerate(tokens):
                try:
                    height_s, color_s = token.split(":")
                    heights[px, j] = float(height_s)
                    colors[px, j] = int(color_s, 16)
                except ValueError:
                    raise ParseError(f"bad pixel token {token!r}", lineno + 1) from None
        frames.append(Snapshot(timestamp, workspace_id, heights, colors, r))
        i += 1 + pl
    return frames
