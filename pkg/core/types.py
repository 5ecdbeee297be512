"""
Common types for the baroreflex circulation model.

Everything here is an immutable value: frozen dataclasses validated in
__post_init__, safe to pass to worker processes.
Time is in minutes, volumes in litres, pressures in mmHg.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import ModelDomainError


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ModelDomainError(f"{name} must be finite, got {value!r}")


# ============================================================
# PARAMETERS
# ============================================================

@dataclass(frozen=True)
class CardioParams:
    """Physical constants of the circulation (adult resting values)."""
    c_sa: float = 0.01          # litres/mmHg
    c_pa: float = 1.0 / 150.0   # gives 1/(R_P*C_PA) = 84 exactly
    c_pv: float = 0.08
    c_sv_base: float = 0.75
    c_l: float = 0.014
    c_r: float = 0.035
    r_s_base: float = 17.5      # mmHg*min/litre
    r_p: float = 25.0 / 14.0
    f_base: float = 80.0        # beats/min
    v_o: float = 5.0            # litres
    v_c: float = 1.0
    v_d_base: float = 2.0

    def __post_init__(self):
        for name, value in self.as_dict().items():
            _require_finite(name, value)
            if value <= 0.0:
                raise ModelDomainError(f"{name} must be strictly positive, got {value!r}")
        if self.v_d_base >= self.v_o:
            raise ModelDomainError(
                f"v_d_base ({self.v_d_base}) must be below total volume v_o ({self.v_o})"
            )

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}

    def base_value(self, kind: "ControlKind") -> float:
        """Resting value of the parameter a control law drives."""
        return {
            ControlKind.LINEAR: math.nan,
            ControlKind.HEART_RATE: self.f_base,
            ControlKind.SYSTEMIC_RESISTANCE: self.r_s_base,
            ControlKind.UNSTRESSED_VOLUME: self.v_d_base,
            ControlKind.VENOUS_COMPLIANCE: self.c_sv_base,
        }[kind]


# ============================================================
# CONTROL VARIANTS
# ============================================================

class ControlKind(Enum):
    """Which parameter the baroreflex drives."""
    LINEAR = "linear"
    HEART_RATE = "heart_rate"
    SYSTEMIC_RESISTANCE = "systemic_resistance"
    UNSTRESSED_VOLUME = "unstressed_volume"
    VENOUS_COMPLIANCE = "venous_compliance"


# Constant names as they appear in config files
CONSTANT_NAMES: Dict[ControlKind, Tuple[str, str]] = {
    ControlKind.HEART_RATE: ("f1", "f2"),
    ControlKind.SYSTEMIC_RESISTANCE: ("r1", "r2"),
    ControlKind.UNSTRESSED_VOLUME: ("d1", "d2"),
    ControlKind.VENOUS_COMPLIANCE: ("c1", "c2"),
}


@dataclass(frozen=True)
class ControlVariant:
    """
    A baroreflex control law with its Hill-law constants.

    HEART_RATE and SYSTEMIC_RESISTANCE fall with activity B:
        x1 * (1 - B) + x2
    UNSTRESSED_VOLUME and VENOUS_COMPLIANCE rise with it:
        x1 * B + x2

    x1/2 + x2 equal to the base value keeps the equilibrium at
    (1.0, 3.5, 0.4), since B = 1/2 there.
    """
    kind: ControlKind = ControlKind.LINEAR
    x1: float = 0.0
    x2: float = 0.0

    def __post_init__(self):
        _require_finite("x1", self.x1)
        _require_finite("x2", self.x2)
        if self.kind is ControlKind.LINEAR:
            return
        first, second = CONSTANT_NAMES[self.kind]
        if self.x1 <= 0.0:
            raise ModelDomainError(f"{first} must be strictly positive, got {self.x1!r}")
        if self.x2 < 0.0:
            raise ModelDomainError(f"{second} must be nonnegative, got {self.x2!r}")

    @classmethod
    def linear(cls) -> "ControlVariant":
        return cls(ControlKind.LINEAR)

    @classmethod
    def heart_rate(cls, f1: float, f2: float) -> "ControlVariant":
        return cls(ControlKind.HEART_RATE, f1, f2)

    @classmethod
    def pure_heart_rate(cls, f0: float) -> "ControlVariant":
        """F = F0 (1 - B), the heart-rate law without a floor."""
        return cls(ControlKind.HEART_RATE, f0, 0.0)

    @classmethod
    def systemic_resistance(cls, r1: float, r2: float) -> "ControlVariant":
        return cls(ControlKind.SYSTEMIC_RESISTANCE, r1, r2)

    @classmethod
    def unstressed_volume(cls, d1: float, d2: float) -> "ControlVariant":
        return cls(ControlKind.UNSTRESSED_VOLUME, d1, d2)

    @classmethod
    def venous_compliance(cls, c1: float, c2: float) -> "ControlVariant":
        return cls(ControlKind.VENOUS_COMPLIANCE, c1, c2)

    @property
    def is_active(self) -> bool:
        return self.kind is not ControlKind.LINEAR

    @property
    def falls_with_activity(self) -> bool:
        return self.kind in (ControlKind.HEART_RATE, ControlKind.SYSTEMIC_RESISTANCE)

    def normalization_gap(self, params: CardioParams) -> float:
        """x1/2 + x2 minus the base value (0 for LINEAR)."""
        if not self.is_active:
            return 0.0
        return self.x1 / 2.0 + self.x2 - params.base_value(self.kind)

    def is_normalized(self, params: CardioParams, rel_tol: float = 1e-12) -> bool:
        base = params.base_value(self.kind) if self.is_active else 1.0
        return abs(self.normalization_gap(params)) <= rel_tol * abs(base)

    def check_normalized(self, params: CardioParams) -> None:
        if not self.is_normalized(params):
            first, second = CONSTANT_NAMES[self.kind]
            raise ModelDomainError(
                f"{first}/2 + {second} = {self.x1 / 2.0 + self.x2:g} but must equal "
                f"{params.base_value(self.kind):g} to keep the resting equilibrium"
            )

    def label(self) -> str:
        if not self.is_active:
            return "linear"
        first, second = CONSTANT_NAMES[self.kind]
        return f"{self.kind.value}({first}={self.x1:g}, {second}={self.x2:g})"


# ============================================================
# STATES
# ============================================================

@dataclass(frozen=True)
class VolumeState:
    """Systemic arterial, systemic venous and pulmonary venous volumes."""
    v_sa: float
    v_sv: float
    v_pv: float

    def __post_init__(self):
        for name in ("v_sa", "v_sv", "v_pv"):
            value = getattr(self, name)
            _require_finite(name, value)
            if value <= 0.0:
                raise ModelDomainError(f"{name} must be strictly positive, got {value!r}")

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "VolumeState":
        if len(values) != 3:
            raise ModelDomainError(f"expected three volumes, got {len(values)}")
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.v_sa, self.v_sv, self.v_pv)

    def v_pa(self, params: CardioParams) -> float:
        """Pulmonary arterial volume from conservation of total volume."""
        return params.v_o - self.v_sa - self.v_sv - self.v_pv

    def check_admissible(self, params: CardioParams) -> None:
        v_pa = self.v_pa(params)
        if v_pa <= 0.0:
            raise ModelDomainError(
                f"reconstructed v_pa = {v_pa:.6g} litres is not positive at {self.as_tuple()}"
            )


RESTING_STATE = VolumeState(1.0, 3.5, 0.4)


@dataclass(frozen=True)
class Observables:
    """Pressures, flows and reflex activity derived from a VolumeState."""
    p_sa: float
    p_sv: float
    p_pa: float
    p_pv: float
    v_pa: float
    q_l: float
    q_r: float
    q_s: float
    q_p: float
    b: float
    k_l: float
    k_r: float

    @property
    def cardiac_output(self) -> float:
        return self.q_l


# ============================================================
# RESULTS
# ============================================================

@dataclass(frozen=True)
class EquilibriumResult:
    state: VolumeState
    residual_norm: float
    iterations: int


class SpectrumKind(Enum):
    THREE_REAL = "three-real"
    REAL_PLUS_PAIR = "one-real-plus-conjugate-pair"


@dataclass(frozen=True)
class Spectrum:
    """
    Eigenvalues of a real 3x3 matrix.

    For REAL_PLUS_PAIR, eigenvalues are (real, re + i*omega, re - i*omega).
    For THREE_REAL the pair fields are None and real_eigenvalue is the
    largest (leading) eigenvalue.
    """
    eigenvalues: Tuple[complex, complex, complex]
    kind: SpectrumKind
    real_eigenvalue: float
    pair_real_part: Optional[float] = None
    pair_imag_part: Optional[float] = None
    degenerate: bool = False
    coefficients: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def has_pair(self) -> bool:
        return self.kind is SpectrumKind.REAL_PLUS_PAIR

    @property
    def leading_real_part(self) -> float:
        return max(ev.real for ev in self.eigenvalues)

    @property
    def is_stable(self) -> bool:
        return self.leading_real_part < 0.0


@dataclass(frozen=True)
class SweepPoint:
    """One grid point of a gain sweep; pair fields are None without a pair."""
    mu: float
    pair_real_part: Optional[float] = None
    pair_imag_part: Optional[float] = None
    real_eigenvalue: Optional[float] = None
    error: Optional[str] = None

    @property
    def has_pair(self) -> bool:
        return self.pair_real_part is not None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class CrossingResult:
    mu_star: float
    omega_star: float           # rad/min
    period_s: float
    bracket: Tuple[float, float]
    bisection_iterations: int

    @classmethod
    def from_omega(cls, mu_star: float, omega_star: float,
                   bracket: Tuple[float, float], iterations: int) -> "CrossingResult":
        return cls(mu_star, omega_star, period_from_omega(omega_star), bracket, iterations)

    @property
    def frequency_hz(self) -> float:
        return self.omega_star / (2.0 * math.pi * 60.0)

    def in_mayer_band(self, lo_s: float = 7.0, hi_s: float = 12.0) -> bool:
        return lo_s <= self.period_s <= hi_s


def period_from_omega(omega: float) -> float:
    """Period in seconds of an oscillation at omega rad/min."""
    if omega <= 0.0:
        return math.inf
    return 60.0 * 2.0 * math.pi / omega


class ScanKind(Enum):
    STABLE = "stable-up-to-mu-max"
    CROSSING = "crossing-found"
    UNSTABLE = "unstable-throughout"


@dataclass(frozen=True)
class ScanVerdict:
    kind: ScanKind
    mu_max: float
    max_pair_real_part: Optional[float] = None
    crossing: Optional[CrossingResult] = None
    skipped_points: int = 0

    @property
    def is_stable(self) -> bool:
        return self.kind is ScanKind.STABLE


class BoundaryFamily(Enum):
    """Two-parameter families whose normalization fixes the equilibrium."""
    UNSTRESSED_VOLUME = "vd"
    VENOUS_COMPLIANCE = "csv"

    def upper_bound(self, params: CardioParams) -> float:
        """Exclusive upper limit of the secondary constant."""
        if self is BoundaryFamily.UNSTRESSED_VOLUME:
            return params.v_d_base
        return params.c_sv_base

    def variant_for(self, secondary: float, params: CardioParams) -> ControlVariant:
        upper = self.upper_bound(params)
        if not 0.0 <= secondary < upper:
            raise ModelDomainError(
                f"secondary constant {secondary!r} outside [0, {upper:g}) for family {self.value}"
            )
        primary = 2.0 * (upper - secondary)
        if self is BoundaryFamily.UNSTRESSED_VOLUME:
            return ControlVariant.unstressed_volume(primary, secondary)
        return ControlVariant.venous_compliance(primary, secondary)

    def grid(self, count: int, params: CardioParams) -> Tuple[float, ...]:
        """count evenly spaced secondary values k*upper/count, k = 0..count-1."""
        upper = self.upper_bound(params)
        return tuple(upper * k / count for k in range(count))


@dataclass(frozen=True)
class BoundaryPoint:
    secondary: float
    mu_star: Optional[float]    # None: no crossing up to mu_max
    omega_star: Optional[float] = None
    period_s: Optional[float] = None
    verdict: ScanKind = ScanKind.CROSSING
    error: Optional[str] = None

    @property
    def marker(self) -> str:
        """Text standing in for mu_star when there is no crossing."""
        return "failed" if self.error else self.verdict.value


@dataclass(frozen=True)
class BoundaryCurve:
    family: BoundaryFamily
    mu_max: float
    points: Tuple[BoundaryPoint, ...] = field(default_factory=tuple)

    def crossings(self) -> Tuple[BoundaryPoint, ...]:
        return tuple(p for p in self.points if p.mu_star is not None)

    def is_strictly_increasing(self) -> bool:
        values = [p.mu_star for p in self.crossings()]
        return all(b > a for a, b in zip(values, values[1:]))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled solution; states has shape (len(times), 3)."""
    times: np.ndarray
    states: np.ndarray
    dt: float
    t_end: float

    def __len__(self) -> int:
        return len(self.times)

    @property
    def v_sa(self) -> np.ndarray:
        return self.states[:, 0]

    def state_at(self, index: int) -> VolumeState:
        return VolumeState.from_sequence(self.states[index])

    @property
    def final_state(self) -> VolumeState:
        return self.state_at(-1)


class CycleKind(Enum):
    DECAYING = "decaying"
    SUSTAINED = "sustained"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CycleReport:
    classification: CycleKind
    amplitude: float                    # peak-to-trough of v_sa, litres
    period_s: Optional[float]
    peak_times: Tuple[float, ...] = ()
    cycle_amplitudes: Tuple[float, ...] = ()
