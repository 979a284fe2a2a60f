"""Presenting simplicial toric varieties as quotients U/G of smooth varieties by finite groups."""

__version__ = "0.1.0"

from .fan import Fan, class_group, local_class_group, validate_fan  # noqa: E402
from .lift import ConstructionResult, construct  # noqa: E402

__all__ = ["ConstructionResult", "Fan", "__version__", "class_group", "construct", "local_class_group",
           "validate_fan"]
