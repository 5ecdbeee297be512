"""
Dynamics
--------
Fixed-step RK4 integration and limit-cycle classification.

Usage:
    from core.dynamics import integrate, detect_cycle

    traj = integrate(params, variant, 20.0, VolumeState(1.0, 3.47, 0.39), dt=1e-4, t_end=10.0)
    report = detect_cycle(traj)        # CycleKind.SUSTAINED, period ~7.2 s
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from .errors import ModelDomainError, StepSizeError, TrajectoryTooShortError
from .model import VectorField, make_vector_field
from .types import CardioParams, ControlVariant, CycleKind, CycleReport, Trajectory, VolumeState

log = logging.getLogger(__name__)

DEFAULT_DT = 1e-4               # minutes
DEFAULT_T_END = 10.0            # minutes
DEFAULT_TRANSIENT_FRACTION = 0.5
GUARD_FRACTION = 0.01
GUARD_TOLERANCE = 1e-6          # litres

SUSTAINED_AMPLITUDE = 1e-4      # litres
DECAYED_AMPLITUDE = 1e-5
STEADINESS = 0.01               # relative spread of the last cycles
STEADY_CYCLES = 5
MIN_PEAKS = 6
# cycles smaller than this are rounding noise around the equilibrium
NOISE_FLOOR = 1e-12


# ============================================================
# INTEGRATION
# ============================================================

def _rk4(field: VectorField, start: Tuple[float, float, float], dt: float, count: int,
         v_o: float, t0: float = 0.0, out: Optional[np.ndarray] = None) -> Tuple[float, float, float]:
    """Advance `count` RK4 steps, writing each new state to out[i + 1]."""
    x1, x2, x3 = start
    half = 0.5 * dt
    sixth = dt / 6.0
    for i in range(count):
        a1, a2, a3 = field(x1, x2, x3)
        b1, b2, b3 = field(x1 + half * a1, x2 + half * a2, x3 + half * a3)
        c1, c2, c3 = field(x1 + half * b1, x2 + half * b2, x3 + half * b3)
        d1, d2, d3 = field(x1 + dt * c1, x2 + dt * c2, x3 + dt * c3)
        x1 += sixth * (a1 + 2.0 * (b1 + c1) + d1)
        x2 += sixth * (a2 + 2.0 * (b2 + c2) + d2)
        x3 += sixth * (a3 + 2.0 * (b3 + c3) + d3)

        if not x1 > 0.0 or not v_o - x1 - x2 - x3 > 0.0:
            raise ModelDomainError(
                f"trajectory left the admissible domain at t={t0 + (i + 1) * dt:.6g} min "
                f"(v_sa={x1:.6g}, v_pa={v_o - x1 - x2 - x3:.6g})"
            )
        if out is not None:
            out[i + 1, 0] = x1
            out[i + 1, 1] = x2
            out[i + 1, 2] = x3
    return x1, x2, x3


def step_count(dt: float, t_end: float) -> int:
    """Number of steps on the grid 0, dt, ..., floor(t_end/dt)*dt."""
    return int(math.floor(t_end / dt + 1e-9))


def check_step_size(field: VectorField, initial: Tuple[float, float, float], dt: float,
                    steps: int, v_o: float) -> float:
    """
    Compare `steps` RK4 steps of dt against 2*steps of dt/2.

    Returns the largest component discrepancy; raises StepSizeError above
    GUARD_TOLERANCE.
    """
    coarse = _rk4(field, initial, dt, steps, v_o)
    fine = _rk4(field, initial, 0.5 * dt, 2 * steps, v_o)
    discrepancy = max(abs(c - f) for c, f in zip(coarse, fine))
    if discrepancy > GUARD_TOLERANCE:
        raise StepSizeError(
            f"dt={dt:g} min is too coarse: half-step discrepancy {discrepancy:.3e} litres "
            f"exceeds {GUARD_TOLERANCE:g} after {steps} steps",
            discrepancy=discrepancy,
        )
    return discrepancy


def integrate(params: CardioParams, variant: ControlVariant, mu: float, initial: VolumeState,
              dt: float = DEFAULT_DT, t_end: float = DEFAULT_T_END) -> Trajectory:
    """Classic RK4 with fixed step dt from t = 0 to t_end (minutes)."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_end >= 100.0 * dt:
        raise ValueError(f"t_end must cover at least 100 steps (t_end={t_end}, dt={dt})")
    initial.check_admissible(params)

    field = make_vector_field(params, variant, mu)
    n = step_count(dt, t_end)
    start = initial.as_tuple()

    guard_steps = max(1, int(GUARD_FRACTION * n))
    discrepancy = check_step_size(field, start, dt, guard_steps, params.v_o)
    log.debug("[RK4] dt=%g guard discrepancy %.3e over %d steps", dt, discrepancy, guard_steps)

    states = np.empty((n + 1, 3), dtype=float)
    states[0] = start
    _rk4(field, start, dt, n, params.v_o, out=states)
    times = np.arange(n + 1, dtype=float) * dt
    return Trajectory(times=times, states=states, dt=dt, t_end=t_end)


# ============================================================
# CYCLE DETECTION
# ============================================================

def strict_peaks(values: np.ndarray) -> np.ndarray:
    """Indices of strict three-point local maxima."""
    interior = values[1:-1]
    mask = (interior > values[:-2]) & (interior > values[2:])
    return np.flatnonzero(mask) + 1


def _cycle_amplitudes(window: np.ndarray, peaks: np.ndarray) -> List[Tuple[int, float]]:
    """(peak index, peak minus preceding trough) for each peak after the first."""
    cycles = []
    for left, right in zip(peaks[:-1], peaks[1:]):
        cycles.append((int(right), float(window[right] - window[left:right + 1].min())))
    return cycles


def detect_cycle(traj: Trajectory,
                 transient_fraction: float = DEFAULT_TRANSIENT_FRACTION) -> CycleReport:
    """
    Classify the tail of a trajectory as a decaying spiral or a limit cycle.

    The trajectory should span at least 20 oscillation periods. v_sa is
    examined after discarding the leading transient_fraction of samples.
    """
    if not 0.0 <= transient_fraction < 1.0:
        raise ValueError(f"transient_fraction must be in [0, 1), got {transient_fraction}")
    start = int(math.floor(transient_fraction * len(traj)))
    window = traj.v_sa[start:]
    times = traj.times[start:]
    if len(window) < 3:
        raise TrajectoryTooShortError(
            f"only {len(window)} samples remain after discarding the transient"
        )

    amplitude = float(window.max() - window.min())
    cycles = [(i, a) for i, a in _cycle_amplitudes(window, strict_peaks(window)) if a > NOISE_FLOOR]
    peak_times = tuple(float(times[i]) for i, _ in cycles)
    amplitudes = tuple(a for _, a in cycles)
    decreasing = all(b < a for a, b in zip(amplitudes, amplitudes[1:]))
    final_amplitude = amplitudes[-1] if amplitudes else amplitude

    period_s = None
    if len(peak_times) >= 2:
        period_s = float(np.mean(np.diff(peak_times))) * 60.0

    def report(kind: CycleKind) -> CycleReport:
        return CycleReport(kind, amplitude, period_s, peak_times, amplitudes)

    # the first peak only anchors the first cycle
    peak_count = len(cycles) + 1 if cycles else 0
    if peak_count < MIN_PEAKS:
        return report(CycleKind.INCONCLUSIVE)
    if amplitude < DECAYED_AMPLITUDE and decreasing:
        return report(CycleKind.DECAYING)

    last = np.array(amplitudes[-STEADY_CYCLES:])
    mean = float(last.mean())
    steady = bool(np.all(np.abs(last - mean) <= STEADINESS * mean))
    if amplitude > SUSTAINED_AMPLITUDE and steady:
        return report(CycleKind.SUSTAINED)
    if decreasing and final_amplitude < DECAYED_AMPLITUDE:
        return report(CycleKind.DECAYING)
    return report(CycleKind.INCONCLUSIVE)
