"""Exception types shared across the engine."""

from __future__ import annotations


class BrickworksError(Exception):
    """Base class for all engine errors."""


# --- world ---


class UnknownTypeError(BrickworksError):
    """Brick type id is not in the catalog."""


class OutOfBoundsError(BrickworksError):
    """Footprint does not fit inside the plate bounds."""


class CellOccupiedError(BrickworksError):
    """Placement overlaps an existing brick."""

    def __init__(self, cell: tuple[int, int, int], blocking_id: int):
        super().__init__(f"cell {cell} already occupied by instance {blocking_id}")
        self.cell = cell
        self.blocking_id = blocking_id


class UnknownInstanceError(BrickworksError):
    """Instance id is not present in the workspace."""


class ParseError(BrickworksError):
    """Malformed line in one of the text file formats."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# --- perception ---


class DimensionMismatchError(BrickworksError):
    """Snapshot pixel array does not match resolution * plate dims."""


class EmptyStreamError(BrickworksError):
    """Keyframe detection needs at least one frame."""


# --- learner ---


class DemonstrationError(BrickworksError):
    """A keyframe pair cannot be explained as a single-brick move."""

    def __init__(self, message: str, keyframe_index: int | None = None):
        if keyframe_index is not None:
            message = f"keyframe {keyframe_index}: {message}"
        super().__init__(message)
        self.keyframe_index = keyframe_index


class NoChangeError(DemonstrationError):
    """The two keyframes are identical."""


class MultiBrickChangeError(DemonstrationError):
    """The diff is not explainable by one brick."""


class UnknownFootprintError(DemonstrationError):
    """No catalog type matches the observed rectangle and color."""


class InconsistentColorError(DemonstrationError):
    """The changed region does not have a single palette color."""


class InitialAssemblyNotEmptyError(DemonstrationError):
    """Demonstrations must start from an empty assembly plate."""


# --- manipulation ---


class InvalidSideError(BrickworksError):
    """Side must be one of +x, -x, +y, -y."""


# --- twin ---


class EndOfGraphError(BrickworksError):
    """No nodes left to step through."""


class InvalidIndexError(BrickworksError):
    """Rewind target is outside the applied history."""


class StorageMismatchError(BrickworksError):
    """Initial workspaces do not hold the bricks the graph refers to."""


# --- sequencer ---


class InfeasibleTargetError(BrickworksError):
    """Target structure fails the structural check; no order can build it."""


class BudgetExceededError(BrickworksError):
    """Search node budget exhausted before a verdict."""


class TooLargeError(BrickworksError):
    """Instance exceeds the configured size cap."""


# --- service ---


class UnknownSessionError(BrickworksError):
    """No session with this id."""


class InvalidLayoutError(BrickworksError):
    """Initial storage layout fails the structural check."""


class EmptyGraphError(BrickworksError):
    """Verification requires at least one demonstrated step."""
