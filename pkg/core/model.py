"""
Model
-----
Right-hand side of the three-compartment circulation with baroreflex.

State is (v_sa, v_sv, v_pv); the pulmonary arterial volume follows from
conservation, v_pa = v_o - v_sa - v_sv - v_pv.

    p_sa = v_sa / C_SA            p_pa = v_pa / C_PA
    p_sv = (v_sv - V_D) / C_SV    p_pv = v_pv / C_PV

    q_s = (p_sa - p_sv) / R_S     q_p = (p_pa - p_pv) / R_P
    q_l = F * C_L * p_pv          q_r = F * C_R * p_sv

    v_sa' = q_l - q_s    v_sv' = q_s - q_r    v_pv' = q_p - q_l

One of F, R_S, V_D, C_SV is replaced by its control law evaluated at the
baroreceptor activity B = hill_activity(v_sa).

Usage:
    from core.model import rhs, make_vector_field
    from core.types import CardioParams, ControlVariant, VolumeState

    params = CardioParams()
    variant = ControlVariant.unstressed_volume(4.0, 0.0)
    rhs(params, variant, 18.0, VolumeState(1.0, 3.5, 0.4))  # -> [0, 0, 0]
"""

import math
import sys
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from .errors import ModelDomainError
from .types import (
    CardioParams,
    ControlKind,
    ControlVariant,
    Observables,
    VolumeState,
)

VectorField = Callable[[float, float, float], Tuple[float, float, float]]

# Largest double below 1; activity saturates here instead of reaching 1.
ACTIVITY_CEILING = math.nextafter(1.0, 0.0)
# Smallest normal double; 1 - activity never reaches 0.
COMPLEMENT_FLOOR = sys.float_info.min


# ============================================================
# BARORECEPTOR
# ============================================================

def hill_split(v_sa: float, v_c: float, mu: float) -> Tuple[float, float]:
    """
    Baroreceptor activity B and its complement 1 - B.

    Both come from the logistic of z = 4*mu*ln(v_sa/v_c) with the small
    one evaluated as e/(1 + e), so neither is formed by subtracting from 1.
    """
    if not v_sa > 0.0:
        raise ModelDomainError(f"arterial volume must be positive, got v_sa={v_sa!r}")
    if not v_c > 0.0:
        raise ModelDomainError(f"critical volume must be positive, got v_c={v_c!r}")
    if not mu > 0.0:
        raise ModelDomainError(f"gain must be positive, got mu={mu!r}")

    z = 4.0 * mu * math.log(v_sa / v_c)
    if z >= 0.0:
        e = math.exp(-z)
        return min(1.0 / (1.0 + e), ACTIVITY_CEILING), max(e / (1.0 + e), COMPLEMENT_FLOOR)
    e = math.exp(z)
    return e / (1.0 + e), 1.0 / (1.0 + e)


def hill_activity(v_sa: float, v_c: float, mu: float) -> float:
    """
    Baroreceptor activity v_sa^n / (v_c^n + v_sa^n) with n = 4*mu.

    Large exponents saturate to 0 or ACTIVITY_CEILING instead of
    overflowing. The slope at v_sa = v_c = 1 equals mu.
    """
    return hill_split(v_sa, v_c, mu)[0]


def hill_complement(v_sa: float, v_c: float, mu: float) -> float:
    """1 - hill_activity, accurate where the activity is close to 1."""
    return hill_split(v_sa, v_c, mu)[1]


def control_value(variant: ControlVariant, b: float, params: CardioParams,
                  complement: Optional[float] = None) -> float:
    """
    Effective value of the parameter the variant controls at activity b.

    Heart rate and systemic resistance fall with activity and use
    complement (1 - b) when given, so that values near saturation keep
    their precision. The linear model controls nothing and returns nan.
    """
    if not 0.0 <= b < 1.0:
        raise ModelDomainError(f"activity must lie in [0, 1), got b={b!r}")
    if variant.kind is ControlKind.LINEAR:
        return math.nan
    if variant.falls_with_activity:
        return variant.x1 * (1.0 - b if complement is None else complement) + variant.x2
    return variant.x1 * b + variant.x2


class EffectiveParams(NamedTuple):
    f: float
    r_s: float
    v_d: float
    c_sv: float


def effective_params(params: CardioParams, variant: ControlVariant, b: float,
                     complement: Optional[float] = None) -> EffectiveParams:
    """The four reflex-sensitive parameters with the variant's law applied."""
    f, r_s, v_d, c_sv = params.f_base, params.r_s_base, params.v_d_base, params.c_sv_base
    kind = variant.kind
    if kind is ControlKind.LINEAR:
        return EffectiveParams(f, r_s, v_d, c_sv)

    value = control_value(variant, b, params, complement)
    if kind is ControlKind.HEART_RATE:
        f = value
    elif kind is ControlKind.SYSTEMIC_RESISTANCE:
        r_s = value
    elif kind is ControlKind.UNSTRESSED_VOLUME:
        v_d = value
    else:
        c_sv = value

    if r_s <= 0.0:
        raise ModelDomainError(f"effective systemic resistance is not positive (r_s={r_s!r})")
    if c_sv <= 0.0:
        raise ModelDomainError(f"effective venous compliance is not positive (c_sv={c_sv!r})")
    return EffectiveParams(f, r_s, v_d, c_sv)


# ============================================================
# VECTOR FIELD
# ============================================================

def make_vector_field(params: CardioParams, variant: ControlVariant, mu: float) -> VectorField:
    """
    Build f(v_sa, v_sv, v_pv) -> (v_sa', v_sv', v_pv') in litres/min.

    Works on plain floats; the integrator and Newton solver call it in
    their inner loops. Only v_sa > 0 is required, v_pa may be negative.
    """
    if variant.is_active and not mu > 0.0:
        raise ModelDomainError(f"gain must be positive for {variant.label()}, got mu={mu!r}")

    c_sa, c_pa, c_pv = params.c_sa, params.c_pa, params.c_pv
    c_l, c_r, r_p = params.c_l, params.c_r, params.r_p
    v_o, v_c = params.v_o, params.v_c
    linear = effective_params(params, variant, 0.5) if not variant.is_active else None

    def field(v_sa: float, v_sv: float, v_pv: float) -> Tuple[float, float, float]:
        if linear is not None:
            if not v_sa > 0.0:
                raise ModelDomainError(f"arterial volume must be positive, got v_sa={v_sa!r}")
            f, r_s, v_d, c_sv = linear
        else:
            b, complement = hill_split(v_sa, v_c, mu)
            f, r_s, v_d, c_sv = effective_params(params, variant, b, complement)

        p_sa = v_sa / c_sa
        p_sv = (v_sv - v_d) / c_sv
        p_pa = (v_o - v_sa - v_sv - v_pv) / c_pa
        p_pv = v_pv / c_pv

        q_s = (p_sa - p_sv) / r_s
        q_p = (p_pa - p_pv) / r_p
        q_l = f * c_l * p_pv
        q_r = f * c_r * p_sv
        return (q_l - q_s, q_s - q_r, q_p - q_l)

    return field


def rhs(params: CardioParams, variant: ControlVariant, mu: float, state: VolumeState) -> np.ndarray:
    """Time derivative of the state, litres/min, as a length-3 array."""
    field = make_vector_field(params, variant, mu)
    return np.array(field(*state.as_tuple()), dtype=float)


def observables(params: CardioParams, variant: ControlVariant, mu: float,
                state: VolumeState) -> Observables:
    """Pressures, flows, activity and cardiac gains at a state."""
    state.check_admissible(params)
    # the linear model has no gain; report the resting activity
    if variant.is_active or mu > 0.0:
        b, complement = hill_split(state.v_sa, params.v_c, mu)
    else:
        b, complement = 0.5, 0.5
    f, r_s, v_d, c_sv = effective_params(params, variant, b, complement)

    v_pa = state.v_pa(params)
    p_sa = state.v_sa / params.c_sa
    p_sv = (state.v_sv - v_d) / c_sv
    p_pa = v_pa / params.c_pa
    p_pv = state.v_pv / params.c_pv
    k_l = f * params.c_l
    k_r = f * params.c_r

    return Observables(
        p_sa=p_sa,
        p_sv=p_sv,
        p_pa=p_pa,
        p_pv=p_pv,
        v_pa=v_pa,
        q_l=k_l * p_pv,
        q_r=k_r * p_sv,
        q_s=(p_sa - p_sv) / r_s,
        q_p=(p_pa - p_pv) / params.r_p,
        b=b,
        k_l=k_l,
        k_r=k_r,
    )


def residual_norm(params: CardioParams, variant: ControlVariant, mu: float,
                  state: VolumeState) -> float:
    """Max-norm of rhs at the state."""
    return float(np.max(np.abs(rhs(params, variant, mu, state))))
