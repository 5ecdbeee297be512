"""
Bifurcation
-----------
Gain sweeps, Hopf crossing location and two-parameter stability maps.

A crossing is where the real part of the conjugate eigenvalue pair of the
linearization changes sign from negative to positive as mu grows. It is
bracketed on a coarse grid and refined by bisection; grid points whose
spectrum has no conjugate pair never serve as bracket endpoints.

Usage:
    from core.bifurcation import sweep_mu, find_crossing, stability_scan, boundary_curve

    variant = ControlVariant.unstressed_volume(4.0, 0.0)
    crossing = find_crossing(CardioParams(), variant, 10.0, 30.0)
    crossing.mu_star, crossing.period_s     # ~17.76, ~7.17 s
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BracketError, MayerWavesError
from .spectral import classify_at_equilibrium
from .types import (
    BoundaryCurve,
    BoundaryFamily,
    BoundaryPoint,
    CardioParams,
    ControlVariant,
    CrossingResult,
    ScanKind,
    ScanVerdict,
    Spectrum,
    SweepPoint,
)
from .utils import ordered_map

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
DEFAULT_MU_MAX = 100.0
DEFAULT_SCAN_POINTS = 200
MAX_BISECTIONS = 200


# ============================================================
# SWEEPS
# ============================================================

def _sweep_point(task: Tuple[CardioParams, ControlVariant, float]) -> SweepPoint:
    params, variant, mu = task
    try:
        spectrum = classify_at_equilibrium(params, variant, mu)
    except MayerWavesError as exc:
        return SweepPoint(mu, error=str(exc))
    if spectrum.has_pair:
        return SweepPoint(mu, spectrum.pair_real_part, spectrum.pair_imag_part,
                          spectrum.real_eigenvalue)
    return SweepPoint(mu, real_eigenvalue=spectrum.real_eigenvalue)


def _evaluate_grid(params: CardioParams, variant: ControlVariant, grid: Iterable[float],
                   workers: int) -> List[SweepPoint]:
    tasks = [(params, variant, float(mu)) for mu in grid]
    points = ordered_map(_sweep_point, tasks, workers=workers, chunksize=8)
    for point in points:
        if point.failed:
            log.warning("[Sweep] %s mu=%g: %s", variant.label(), point.mu, point.error)
    return points


def sweep_mu(params: CardioParams, variant: ControlVariant, mu_min: float, mu_max: float,
             steps: int, workers: int = 1) -> List[SweepPoint]:
    """Spectrum at each point of a uniform grid of `steps` gains over [mu_min, mu_max]."""
    if not 0.0 < mu_min < mu_max:
        raise ValueError(f"need 0 < mu_min < mu_max, got [{mu_min}, {mu_max}]")
    if steps < 2:
        raise ValueError(f"need at least 2 grid points, got {steps}")
    return _evaluate_grid(params, variant, np.linspace(mu_min, mu_max, steps), workers)


# ============================================================
# CROSSING
# ============================================================

def _pair_spectrum(params: CardioParams, variant: ControlVariant, mu: float) -> Spectrum:
    spectrum = classify_at_equilibrium(params, variant, mu)
    if not spectrum.has_pair:
        raise BracketError(f"no conjugate eigenvalue pair at mu={mu:g} for {variant.label()}")
    return spectrum


def find_crossing(params: CardioParams, variant: ControlVariant, mu_lo: float, mu_hi: float,
                  tol: float = DEFAULT_TOL) -> CrossingResult:
    """Bisect [mu_lo, mu_hi] on the pair's real part down to width tol."""
    if not 0.0 < mu_lo < mu_hi:
        raise BracketError(f"need 0 < mu_lo < mu_hi, got [{mu_lo}, {mu_hi}]")
    if not tol > 0.0:
        raise BracketError(f"tolerance must be positive, got {tol}")

    re_lo = _pair_spectrum(params, variant, mu_lo).pair_real_part
    re_hi = _pair_spectrum(params, variant, mu_hi).pair_real_part
    if not re_lo < 0.0 < re_hi:
        raise BracketError(
            f"no sign change of the pair real part on [{mu_lo:g}, {mu_hi:g}] "
            f"for {variant.label()} ({re_lo:.4g}, {re_hi:.4g})"
        )

    lo, hi = mu_lo, mu_hi
    iterations = 0
    while hi - lo > tol and iterations < MAX_BISECTIONS:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _pair_spectrum(params, variant, mid).pair_real_part < 0.0:
            lo = mid
        else:
            hi = mid
        iterations += 1

    mu_star = 0.5 * (lo + hi)
    omega = _pair_spectrum(params, variant, mu_star).pair_imag_part
    crossing = CrossingResult.from_omega(mu_star, omega, (mu_lo, mu_hi), iterations)
    log.info("[Crossing] %s mu*=%.6f omega=%.4f rad/min period=%.3f s",
             variant.label(), crossing.mu_star, crossing.omega_star, crossing.period_s)
    return crossing


# ============================================================
# SCANS
# ============================================================

def _leading_real_part(point: SweepPoint) -> float:
    if point.has_pair:
        return max(point.pair_real_part, point.real_eigenvalue)
    return point.real_eigenvalue


def stability_scan(params: CardioParams, variant: ControlVariant, mu_max: float = DEFAULT_MU_MAX,
                   points: int = DEFAULT_SCAN_POINTS, tol: float = DEFAULT_TOL,
                   workers: int = 1) -> ScanVerdict:
    """
    Coarse scan of mu over (0, mu_max] at mu_max*k/points, k = 1..points.

    The first negative-to-positive change of the pair real part between
    consecutive pair-carrying points is refined with find_crossing.
    """
    if not mu_max > 0.0:
        raise ValueError(f"mu_max must be positive, got {mu_max}")
    if points < 2:
        raise ValueError(f"need at least 2 scan points, got {points}")

    grid = [mu_max * k / points for k in range(1, points + 1)]
    sweep = _evaluate_grid(params, variant, grid, workers)
    evaluated = [p for p in sweep if not p.failed]
    with_pair = [p for p in evaluated if p.has_pair]
    skipped = len(sweep) - len(with_pair)
    max_re: Optional[float] = max((p.pair_real_part for p in with_pair), default=None)

    for prev, cur in zip(with_pair, with_pair[1:]):
        if prev.pair_real_part < 0.0 < cur.pair_real_part:
            crossing = find_crossing(params, variant, prev.mu, cur.mu, tol)
            return ScanVerdict(ScanKind.CROSSING, mu_max, max_re, crossing, skipped)

    stable = all(_leading_real_part(p) < 0.0 for p in evaluated) and bool(evaluated)
    kind = ScanKind.STABLE if stable else ScanKind.UNSTABLE
    log.info("[Scan] %s up to mu=%g: %s (max pair Re %s)", variant.label(), mu_max,
             kind.value, "n/a" if max_re is None else f"{max_re:.4g}")
    return ScanVerdict(kind, mu_max, max_re, None, skipped)


# ============================================================
# BOUNDARY
# ============================================================

def _boundary_point(task: Tuple[CardioParams, BoundaryFamily, float, float, int, float]) -> BoundaryPoint:
    params, family, secondary, mu_max, points, tol = task
    variant = family.variant_for(secondary, params)
    try:
        verdict = stability_scan(params, variant, mu_max, points, tol)
    except MayerWavesError as exc:
        log.warning("[Boundary] %s: %s", variant.label(), exc)
        return BoundaryPoint(secondary, None, error=str(exc))
    if verdict.crossing is None:
        return BoundaryPoint(secondary, None, verdict=verdict.kind)
    c = verdict.crossing
    return BoundaryPoint(secondary, c.mu_star, c.omega_star, c.period_s)


def boundary_curve(params: CardioParams, family: BoundaryFamily, grid: Sequence[float],
                   mu_max: float = DEFAULT_MU_MAX, points: int = DEFAULT_SCAN_POINTS,
                   tol: float = DEFAULT_TOL, workers: int = 1) -> BoundaryCurve:
    """
    Crossing gain as a function of the secondary constant (d2 or c2).

    The primary constant follows the equilibrium-preserving normalization
    d1 = 2(v_d - d2) or c1 = 2(c_sv - c2).
    """
    values = sorted(float(g) for g in grid)
    for value in values:
        family.variant_for(value, params)   # validate before fanning out

    tasks = [(params, family, value, mu_max, points, tol) for value in values]
    curve = BoundaryCurve(family, mu_max, tuple(ordered_map(_boundary_point, tasks, workers)))
    if not curve.is_strictly_increasing():
        log.warning("[Boundary] crossing gain is not strictly increasing along %s",
                    family.value)
    return curve
