"""Core utilities."""

from .parallel import CleanupContext, ordered_map

__all__ = ["CleanupContext", "ordered_map"]
