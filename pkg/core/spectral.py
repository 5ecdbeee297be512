"""
Spectral
--------
Linearization of the vector field and eigenvalues of the 3x3 Jacobian.

The eigenvalues come from the characteristic cubic
    lambda^3 + a*lambda^2 + b*lambda + c = 0
    a = -trace, b = sum of principal 2x2 minors, c = -det
reduced to depressed form t^3 + p*t + q = 0 with t = lambda + a/3.
The sign of the discriminant (q/2)^2 + (p/3)^3 picks Cardano's formula
(one real root plus a conjugate pair) or the trigonometric form (three
real roots).

Usage:
    from core.spectral import jacobian_fd, eig3, classify_at_equilibrium

    spectrum = classify_at_equilibrium(CardioParams(), ControlVariant.unstressed_volume(4, 0), 20.0)
    spectrum.pair_real_part   # > 0: past the Hopf crossing
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from .errors import ModelDomainError
from .model import make_vector_field
from .types import (
    CardioParams,
    ControlVariant,
    RESTING_STATE,
    Spectrum,
    SpectrumKind,
    VolumeState,
)

log = logging.getLogger(__name__)

FD_RELATIVE_STEP = 1e-6
DEGENERACY_TOLERANCE = 1e-12
RESIDUAL_TOLERANCE = 1e-8


# ============================================================
# JACOBIAN
# ============================================================

def _stencil_admissible(x: List[float], params: CardioParams) -> bool:
    return x[0] > 0.0 and x[1] > 0.0 and x[2] > 0.0 and params.v_o - sum(x) > 0.0


def jacobian_fd(params: CardioParams, variant: ControlVariant, mu: float,
                state: VolumeState) -> np.ndarray:
    """
    Central-difference Jacobian, entries in 1/min.

    Column j uses h = 1e-6 * max(1, |x_j|). If a stencil point is not
    admissible the step is halved once; a second failure is an error.
    """
    field = make_vector_field(params, variant, mu)
    x = list(state.as_tuple())
    jac = np.empty((3, 3), dtype=float)

    for j in range(3):
        h = FD_RELATIVE_STEP * max(1.0, abs(x[j]))
        for _ in range(2):
            plus, minus = list(x), list(x)
            plus[j] += h
            minus[j] -= h
            if _stencil_admissible(plus, params) and _stencil_admissible(minus, params):
                break
            h *= 0.5
        else:
            raise ModelDomainError(
                f"finite-difference stencil leaves the admissible domain at {state.as_tuple()}"
            )
        f_plus = field(*plus)
        f_minus = field(*minus)
        for i in range(3):
            jac[i, j] = (f_plus[i] - f_minus[i]) / (2.0 * h)

    return jac


# ============================================================
# CUBIC EIGENSOLVER
# ============================================================

def characteristic_coefficients(m: np.ndarray) -> Tuple[float, float, float]:
    """(a, b, c) of det(lambda*I - m) = lambda^3 + a*lambda^2 + b*lambda + c."""
    trace = m[0, 0] + m[1, 1] + m[2, 2]
    minors = (
        m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    )
    det = (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )
    return float(-trace), float(minors), float(-det)


def charpoly(coefficients: Tuple[float, float, float], lam: complex) -> complex:
    a, b, c = coefficients
    return ((lam + a) * lam + b) * lam + c


def residual_bound(lam: complex) -> float:
    return RESIDUAL_TOLERANCE * max(1.0, abs(lam) ** 3)


def _polish_real_root(x: float, a: float, b: float, c: float) -> float:
    """A couple of Newton steps on the cubic, kept only while the residual drops."""
    fx = ((x + a) * x + b) * x + c
    for _ in range(3):
        slope = (3.0 * x + 2.0 * a) * x + b
        if slope == 0.0 or fx == 0.0:
            break
        candidate = x - fx / slope
        f_candidate = ((candidate + a) * candidate + b) * candidate + c
        if abs(f_candidate) >= abs(fx):
            break
        x, fx = candidate, f_candidate
    return x


def eig3(m: np.ndarray) -> Spectrum:
    """Eigenvalues of a real 3x3 matrix, classified as three-real or real-plus-pair."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ModelDomainError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ModelDomainError("matrix has non-finite entries")

    coefficients = characteristic_coefficients(m)
    a, b, c = coefficients
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    half_q = q / 2.0
    third_p = p / 3.0
    disc = half_q * half_q + third_p ** 3
    scale = half_q * half_q + abs(third_p) ** 3

    if scale == 0.0:
        # triple root
        root = -shift
        return Spectrum(
            eigenvalues=(complex(root), complex(root), complex(root)),
            kind=SpectrumKind.THREE_REAL,
            real_eigenvalue=root,
            degenerate=True,
            coefficients=coefficients,
        )

    if disc > DEGENERACY_TOLERANCE * scale:
        # Cardano; w takes the sign that avoids cancellation
        sq = math.sqrt(disc)
        w = -half_q - math.copysign(sq, half_q)
        u = float(np.cbrt(w))
        v = -third_p / u if u != 0.0 else 0.0
        real = _polish_real_root(u + v - shift, a, b, c)
        re = -(a + real) / 2.0
        omega = abs(u - v) * math.sqrt(3.0) / 2.0
        return Spectrum(
            eigenvalues=(complex(real), complex(re, omega), complex(re, -omega)),
            kind=SpectrumKind.REAL_PLUS_PAIR,
            real_eigenvalue=real,
            pair_real_part=re,
            pair_imag_part=omega,
            coefficients=coefficients,
        )

    # trigonometric form, third_p < 0 here
    radius = 2.0 * math.sqrt(-third_p)
    arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
    theta = math.acos(min(1.0, max(-1.0, arg))) / 3.0
    roots = sorted(
        (_polish_real_root(radius * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift, a, b, c)
         for k in range(3)),
        reverse=True,
    )
    return Spectrum(
        eigenvalues=tuple(complex(r) for r in roots),
        kind=SpectrumKind.THREE_REAL,
        real_eigenvalue=roots[0],
        degenerate=abs(disc) <= DEGENERACY_TOLERANCE * scale,
        coefficients=coefficients,
    )


# ============================================================
# CLASSIFICATION
# ============================================================

def classify_at_equilibrium(params: CardioParams, variant: ControlVariant, mu: float,
                            guess: Optional[VolumeState] = None) -> Spectrum:
    """Spectrum of the linearization at the equilibrium for gain mu."""
    from .equilibrium import solve_equilibrium

    result = solve_equilibrium(params, variant, mu, guess or RESTING_STATE)
    spectrum = eig3(jacobian_fd(params, variant, mu, result.state))
    log.debug("%s mu=%.6g: %s", variant.label(), mu, spectrum.eigenvalues)
    return spectrum
