"""
Errors
------
Exception hierarchy for the numerical core.

Every exception derives from MayerWavesError and from the closest builtin
(ValueError / RuntimeError), so callers can catch either.
main.py maps them onto exit codes:

    ModelDomainError, ConvergenceError, BracketError,
    StepSizeError, TrajectoryTooShortError          -> 2 (numeric failure)
"""

from typing import Optional


class MayerWavesError(Exception):
    """Base class for all mayerwaves errors."""


class ModelDomainError(MayerWavesError, ValueError):
    """A state or parameter left the admissible domain."""


class ConvergenceError(MayerWavesError, RuntimeError):
    """Newton iteration failed to reach the residual tolerance."""

    def __init__(self, message: str, iterations: int = 0, residual_norm: Optional[float] = None):
        super().__init__(message)
        self.iterations = iterations
        self.residual_norm = residual_norm


class BracketError(MayerWavesError, ValueError):
    """Bisection bracket has no sign change or lacks a conjugate pair."""


class StepSizeError(MayerWavesError, ValueError):
    """RK4 step rejected by the half-step comparison."""

    def __init__(self, message: str, discrepancy: float = 0.0):
        super().__init__(message)
        self.discrepancy = discrepancy


class TrajectoryTooShortError(MayerWavesError, ValueError):
    """Not enough samples left after discarding the transient."""
