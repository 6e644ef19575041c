"""Discrete grid world: brick catalog, placements, and plate occupancy.

Coordinates are integer stud positions. ``x`` runs along the plate width,
``y`` along its length, and ``z`` is the layer index with ``z=1`` resting
on the plate. All bricks are one layer tall.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .errors import (
    CellOccupiedError,
    OutOfBoundsError,
    ParseError,
    UnknownInstanceError,
    UnknownTypeError,
)

Cell = tuple[int, int, int]
Dims = tuple[int, int, int]

STORAGE = "storage"
ASSEMBLY = "assembly"
WORKSPACES = (STORAGE, ASSEMBLY)

ROTATIONS = (0, 90, 180, 270)

DEFAULT_DIMS: Dims = (48, 48, 16)

# Named colors with a canonical 24-bit reference value, used both for
# rendering synthetic snapshots and for classifying observed pixels.
PALETTE: tuple[tuple[str, int], ...] = (
    ("red", 0xC91A09),
    ("orange", 0xFE8A18),
    ("yellow", 0xF2CD37),
    ("green", 0x237841),
    ("blue", 0x0055BF),
    ("purple", 0x81007B),
    ("white", 0xFFFFFF),
    ("black", 0x05131D),
    ("gray", 0x9BA19D),
    ("tan", 0xE4CD9E),
)
COLOR_RGB = dict(PALETTE)
COLOR_INDEX = {name: i for i, (name, _) in enumerate(PALETTE)}

# Empty plate cells render with this value; it is not a palette entry.
BACKGROUND_COLOR = 0x303030

DEFAULT_FOOTPRINTS = ((1, 1), (1, 2), (1, 4), (1, 6), (2, 2), (2, 4), (2, 6))
DEFAULT_COLORS = ("red", "orange", "yellow", "green", "blue", "purple", "white", "gray")


@dataclass(frozen=True)
class BrickType:
    """Catalog entry: canonical footprint (width <= length) and color."""

    type_id: str
    width: int
    length: int
    color: str

    def __post_init__(self) -> None:
        if not self.type_id or any(ch.isspace() for ch in self.type_id):
            raise ValueError(f"bad type id {self.type_id!r}")
        if self.width < 1 or self.length < 1:
            raise ValueError(f"footprint must be positive, got {self.width}x{self.length}")
        if self.width > self.length:
            raise ValueError("canonical footprint requires width <= length")
        if self.color not in COLOR_RGB:
            raise ValueError(f"unknown palette color {self.color!r}")

    def footprint(self, rot: int) -> tuple[int, int]:
        """Effective (x extent, y extent) at the given rotation."""
        if rot in (0, 180):
            return self.width, self.length
        return self.length, self.width


@dataclass(frozen=True)
class BrickPlacement:
    """A typed brick at an integer grid pose."""

    instance_id: int
    type_id: str
    x: int
    y: int
    z: int
    rot: int

    def __post_init__(self) -> None:
        if self.x < 0 or self.y < 0:
            raise ValueError(f"negative stud coordinate ({self.x}, {self.y})")
        if self.z < 1:
            raise ValueError("layers start at z=1 on the plate")
        if self.rot not in ROTATIONS:
            raise ValueError(f"rotation must be one of {ROTATIONS}, got {self.rot}")

    @property
    def pose(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.z, self.rot)


class Catalog:
    """Immutable collection of brick types keyed by type id."""

    def __init__(self, types: Iterable[BrickType]):
        mapping: dict[str, BrickType] = {}
        for t in types:
            if t.type_id in mapping:
                raise ValueError(f"duplicate type id {t.type_id!r}")
            mapping[t.type_id] = t
        self._types = mapping

    @classmethod
    def default(cls) -> Catalog:
        """Stock catalog: seven footprints in eight colors."""
        types = [
            BrickType(f"{w}x{length}_{color}", w, length, color)
            for (w, length) in DEFAULT_FOOTPRINTS
            for color in DEFAULT_COLORS
        ]
        return cls(types)

    def __getitem__(self, type_id: str) -> BrickType:
        try:
            return self._types[type_id]
        except KeyError:
            raise UnknownTypeError(f"unknown brick type {type_id!r}") from None

    def __contains__(self, type_id: str) -> bool:
        return type_id in self._types

    def __iter__(self) -> Iterator[BrickType]:
        return iter(self._types.values())

    def __len__(self) -> int:
        return len(self._types)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Catalog) and self._types == other._types

    def __repr__(self) -> str:
        return f"Catalog({len(self._types)} types)"


@dataclass(frozen=True)
class WorkspaceState:
    """Occupancy of one plate. Treated as an immutable value.

    ``cells`` maps occupied (x, y, z) cells to the instance id occupying
    them; ``placements`` maps instance ids to their placement. The two
    mappings are kept mutually consistent by :func:`place` and
    :func:`remove`, which return new states instead of mutating.
    """

    workspace_id: str
    dims: Dims
    catalog: Catalog
    cells: dict[Cell, int] = field(default_factory=dict)
    placements: dict[int, BrickPlacement] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.workspace_id not in WORKSPACES:
            raise ValueError(f"workspace must be one of {WORKSPACES}")
        if min(self.dims) < 1:
            raise ValueError(f"bad plate dims {self.dims}")

    @classmethod
    def empty(
        cls,
        workspace_id: str,
        dims: Dims = DEFAULT_DIMS,
        catalog: Catalog | None = None,
    ) -> WorkspaceState:
        return cls(workspace_id, dims, catalog if catalog is not None else Catalog.default())

    def placement(self, instance_id: int) -> BrickPlacement:
        try:
            return self.placements[instance_id]
        except KeyError:
            raise UnknownInstanceError(
                f"no instance {instance_id} in {self.workspace_id} workspace"
            ) from None

    def next_instance_id(self) -> int:
        return max(self.placements, default=0) + 1

    def type_counts(self) -> dict[str, int]:
        """Multiset of brick types present, as type_id -> count."""
        counts: dict[str, int] = {}
        for p in self.placements.values():
            counts[p.type_id] = counts.get(p.type_id, 0) + 1
        return dict(sorted(counts.items()))

    def canonical(self) -> WorkspaceState:
        """Same bricks with instance ids renumbered by (z, x, y).

        Instance ids are bookkeeping, not physical; canonical forms let
        two independently-built states be compared for physical equality.
        """
        ordered = sorted(self.placements.values(), key=lambda p: (p.z, p.x, p.y, p.rot))
        state = replace(self, cells={}, placements={})
        for i, p in enumerate(ordered, start=1):
            state = place(state, replace(p, instance_id=i))
        return state


def footprint_cells(p: BrickPlacement, catalog: Catalog) -> tuple[Cell, ...]:
    """The width x length cells the placement occupies, sorted."""
    bt = catalog[p.type_id]
    fw, fl = bt.footprint(p.rot)
    return tuple(
        (x, y, p.z) for x in range(p.x, p.x + fw) for y in range(p.y, p.y + fl)
    )


def place(state: WorkspaceState, p: BrickPlacement) -> WorkspaceState:
    """Return a new state with ``p`` added; the input state is unchanged."""
    bt = state.catalog[p.type_id]
    fw, fl = bt.footprint(p.rot)
    w, l, h = state.dims
    if p.x + fw > w or p.y + fl > l or p.z > h:
        raise OutOfBoundsError(
            f"{p.type_id} at ({p.x}, {p.y}, {p.z}, rot {p.rot}) exceeds {w}x{l}x{h} plate"
        )
    if p.instance_id in state.placements:
        raise ValueError(f"instance id {p.instance_id} already placed")
    cells = footprint_cells(p, state.catalog)
    for c in cells:
        blocking = state.cells.get(c)
        if blocking is not None:
            raise CellOccupiedError(c, blocking)
    new_cells = dict(state.cells)
    for c in cells:
        new_cells[c] = p.instance_id
    new_placements = dict(state.placements)
    new_placements[p.instance_id] = p
    return replace(state, cells=new_cells, placements=new_placements)


def remove(state: WorkspaceState, instance_id: int) -> WorkspaceState:
    """Return a new state without the instance; other placements untouched."""
    p = state.placement(instance_id)
    new_cells = dict(state.cells)
    for c in footprint_cells(p, state.catalog):
        del new_cells[c]
    new_placements = dict(state.placements)
    del new_placements[instance_id]
    return replace(state, cells=new_cells, placements=new_placements)


def audit(state: WorkspaceState) -> None:
    """Full-scan check that cells and placements agree; raises on drift."""
    expected: dict[Cell, int] = {}
    for instance_id, p in state.placements.items():
        if p.instance_id != instance_id:
            raise AssertionError(f"placement keyed {instance_id} carries id {p.instance_id}")
        for c in footprint_cells(p, state.catalog):
            if c in expected:
                raise AssertionError(f"instances {expected[c]} and {instance_id} share cell {c}")
            expected[c] = instance_id
    if expected != state.cells:
        raise AssertionError("cell map does not match placement footprints")


# --- text formats ---


def parse_catalog(text: str) -> Catalog:
    """Parse the line-oriented catalog format.

    Each entry is ``type <type_id> <width> <length> <color_name>``;
    ``#`` starts a comment.
    """
    types = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "type" or len(parts) != 5:
            raise ParseError(f"expected 'type <id> <width> <length> <color>', got {raw!r}", lineno)
        _, type_id, width_s, length_s, color = parts
        try:
            width, length = int(width_s), int(length_s)
        except ValueError:
            raise ParseError(f"bad footprint numbers in {raw!r}", lineno) from None
        try:
            types.append(BrickType(type_id, width, length, color))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    try:
        return Catalog(types)
    except ValueError as exc:
        raise ParseError(str(exc), 0) from None


def dump_catalog(catalog: Catalog) -> str:
    lines = [f"type {t.type_id} {t.width} {t.length} {t.color}" for t in catalog]
    return "\n".join(lines) + "\n"


def parse_structure(
    text: str,
    catalog: Catalog,
    workspace_id: str = ASSEMBLY,
) -> WorkspaceState:
    """Parse a structure file into a workspace state.

    Header ``bricks v1 <W> <L> <H>`` then one ``<type_id> <x> <y> <z> <rot>``
    line per placement; instance ids are assigned in file order from 1.
    """
    lines = text.splitlines()
    body: list[tuple[int, str]] = []
    header: tuple[int, str] | None = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            header = (lineno, line)
        else:
            body.append((lineno, line))
    if header is None:
        raise ParseError("missing 'bricks v1 <W> <L> <H>' header", 1)
    lineno, line = header
    parts = line.split()
    if len(parts) != 5 or parts[0] != "bricks" or parts[1] != "v1":
        raise ParseError(f"expected 'bricks v1 <W> <L> <H>', got {line!r}", lineno)
    try:
        dims = (int(parts[2]), int(parts[3]), int(parts[4]))
    except ValueError:
        raise ParseError(f"bad dimensions in header {line!r}", lineno) from None
    state = WorkspaceState.empty(workspace_id, dims, catalog)
    for lineno, line in body:
        parts = line.split()
        if len(parts) != 5:
            raise ParseError(f"expected '<type_id> <x> <y> <z> <rot>', got {line!r}", lineno)
        type_id = parts[0]
        try:
            x, y, z, rot = (int(v) for v in parts[1:])
        except ValueError:
            raise ParseError(f"bad pose numbers in {line!r}", lineno) from None
        try:
            p = BrickPlacement(state.next_instance_id(), type_id, x, y, z, rot)
            state = place(state, p)
        except (ValueError, UnknownTypeError, OutOfBoundsError, CellOccupiedError) as exc:
            raise ParseError(str(exc), lineno) from None
    return state


def dump_structure(state: WorkspaceState) -> str:
    w, l, h = state.dims
    lines = [f"bricks v1 {w} {l} {h}"]
    for instance_id in sorted(state.placements):
        p = state.placements[instance_id]
        lines.append(f"{p.type_id} {p.x} {p.y} {p.z} {p.rot}")
    return "\n".join(lines) + "\n"
