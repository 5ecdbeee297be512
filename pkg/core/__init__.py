"""
Core - Baroreflex Model Numerics
--------------------------------
Closed-loop circulation with one baroreflex-controlled parameter.

Key components:
- Types: CardioParams, ControlVariant, VolumeState and the result records
- Model: compartment right-hand side, Hill activity, observables
- Equilibrium: damped Newton solve for the steady state
- Spectral: finite-difference Jacobian, closed-form 3x3 eigenvalues
- Bifurcation: gain sweeps, Hopf crossing bisection, boundary curves
- Dynamics: RK4 integration and limit-cycle detection
- Commands: subcommand registry for the CLI
"""

__version__ = "1.0.0"

from .errors import (
    MayerWavesError,
    ModelDomainError,
    ConvergenceError,
    BracketError,
    StepSizeError,
    TrajectoryTooShortError,
)
from .types import (
    CardioParams,
    ControlKind,
    ControlVariant,
    VolumeState,
    RESTING_STATE,
    Observables,
    EquilibriumResult,
    Spectrum,
    SpectrumKind,
    SweepPoint,
    CrossingResult,
    ScanKind,
    ScanVerdict,
    BoundaryFamily,
    BoundaryPoint,
    BoundaryCurve,
    Trajectory,
    CycleKind,
    CycleReport,
)
from .model import hill_activity, control_value, rhs, observables
from .equilibrium import solve_equilibrium
from .spectral import jacobian_fd, eig3, classify_at_equilibrium
from .bifurcation import sweep_mu, find_crossing, stability_scan, boundary_curve
from .dynamics import integrate, detect_cycle

__all__ = [
    '__version__',

    # Errors
    'MayerWavesError',
    'ModelDomainError',
    'ConvergenceError',
    'BracketError',
    'StepSizeError',
    'TrajectoryTooShortError',

    # Types
    'CardioParams',
    'ControlKind',
    'ControlVariant',
    'VolumeState',
    'RESTING_STATE',
    'Observables',
    'EquilibriumResult',
    'Spectrum',
    'SpectrumKind',
    'SweepPoint',
    'CrossingResult',
    'ScanKind',
    'ScanVerdict',
    'BoundaryFamily',
    'BoundaryPoint',
    'BoundaryCurve',
    'Trajectory',
    'CycleKind',
    'CycleReport',

    # Model
    'hill_activity',
    'control_value',
    'rhs',
    'observables',

    # Analysis
    'solve_equilibrium',
    'jacobian_fd',
    'eig3',
    'classify_at_equilibrium',
    'sweep_mu',
    'find_crossing',
    'stability_scan',
    'boundary_curve',

    # Dynamics
    'integrate',
    'detect_cycle',
]
