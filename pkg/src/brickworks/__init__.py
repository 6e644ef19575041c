"""Brick assembly engine: demonstration learning, structural checks, and a digital twin."""

from .world import (
    ASSEMBLY,
    BACKGROUND_COLOR,
    PALETTE,
    STORAGE,
    BrickPlacement,
    BrickType,
    Catalog,
    WorkspaceState,
    place,
    remove,
)

__version__ = "0.1.0"

__all__ = [
    "ASSEMBLY",
    "BACKGROUND_COLOR",
    "PALETTE",
    "STORAGE",
    "BrickPlacement",
    "BrickType",
    "Catalog",
    "WorkspaceState",
    "place",
    "remove",
    "__version__",
]
