"""Flat dotted-key config files, overridable by CLI flags.

Format: one ``key = value`` per line, ``#`` comments. Recognized keys:
``tool.margin``, ``tool.body_height``, ``tool.length``, ``reach.storage``,
``reach.assembly`` (each "x0 y0 x1 y1"), ``reach.max_height``,
``perception.stability_window``, ``perception.resolution``,
``world.height``.
"""

from __future__ import annotations

from pathlib import Path

from .errors import ParseError
from .manipulation import ToolProfile
from .twin import ReachEnvelope
from .world import Dims


def parse_config(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw!r}", lineno)
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def load_config(path: str | Path | None) -> dict[str, str]:
    if path is None:
        return {}
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _int_key(config: dict[str, str], key: str) -> int | None:
    if key not in config:
        return None
    try:
        return int(config[key])
    except ValueError:
        raise ParseError(f"config key {key} is not an integer: {config[key]!r}", 0) from None


def _rect_key(config: dict[str, str], key: str) -> tuple[int, int, int, int] | None:
    if key not in config:
        return None
    parts = config[key].replace(",", " ").split()
    if len(parts) != 4:
        raise ParseError(f"config key {key} needs 'x0 y0 x1 y1', got {config[key]!r}", 0)
    return tuple(int(v) for v in parts)  # type: ignore[return-value]


def _pick(explicit: int | None, config: dict[str, str], key: str, default: int) -> int:
    if explicit is not None:
        return explicit
    value = _int_key(config, key)
    return value if value is not None else default


def tool_from(
    config: dict[str, str],
    margin: int | None = None,
    body_height: int | None = None,
    tool_length: int | None = None,
) -> ToolProfile:
    """Tool profile from config keys, with explicit arguments winning."""
    base = ToolProfile()
    return ToolProfile(
        margin=_pick(margin, config, "tool.margin", base.margin),
        body_height=_pick(body_height, config, "tool.body_height", base.body_height),
        tool_length=_pick(tool_length, config, "tool.length", base.tool_length),
    )


def reach_from(
    config: dict[str, str],
    dims: Dims,
    rect: tuple[int, int, int, int] | None = None,
    max_height: int | None = None,
) -> ReachEnvelope:
    """Reach envelope from config keys; an explicit rect applies to both plates."""
    full = ReachEnvelope.full(dims)
    storage_rect = rect or _rect_key(config, "reach.storage") or full.storage_rect
    assembly_rect = rect or _rect_key(config, "reach.assembly") or full.assembly_rect
    max_height = _pick(max_height, config, "reach.max_height", full.max_reach_height)
    return ReachEnvelope(storage_rect, assembly_rect, max_height)
