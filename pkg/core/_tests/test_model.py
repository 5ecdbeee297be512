import math
import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))
from core.errors import ModelDomainError
from core.model import (
    ACTIVITY_CEILING,
    COMPLEMENT_FLOOR,
    control_value,
    hill_activity,
    hill_complement,
    observables,
    residual_norm,
    rhs,
)
from core.types import CardioParams, ControlKind, ControlVariant, RESTING_STATE, VolumeState

PARAMS = CardioParams()

# fmt: off
NORMALIZED = (
    ControlVariant.unstressed_volume(4.0, 0.0),
    ControlVariant.unstressed_volume(3.0, 0.5),
    ControlVariant.unstressed_volume(2.0, 1.0),
    ControlVariant.unstressed_volume(1.0, 1.5),
    ControlVariant.venous_compliance(1.5, 0.0),
    ControlVariant.venous_compliance(1.0, 0.25),
    ControlVariant.venous_compliance(0.5, 0.5),
    ControlVariant.heart_rate(160.0, 0.0),
    ControlVariant.heart_rate(80.0, 40.0),
    ControlVariant.heart_rate(40.0, 60.0),
    ControlVariant.systemic_resistance(35.0, 0.0),
    ControlVariant.systemic_resistance(20.0, 7.5),
    ControlVariant.systemic_resistance(15.0, 10.0),
)
# fmt: on


def reference_rhs(variant, mu, v_sa, v_sv, v_pv):
    """
    The compartment equations with the resting constants folded into
    exact rationals:
        q_s = (100 v_sa - p_sv) / R      q_r = 0.035 F p_sv
        q_l = (7/40) F v_pv              q_p = 84 (5 - v_sa - v_sv - v_pv) - 7 v_pv
    """
    s = v_sa ** (4.0 * mu)
    b, nb = s / (1.0 + s), 1.0 / (1.0 + s)
    f, r, v_d, c = 80.0, 17.5, 2.0, 0.75
    if variant.kind is ControlKind.HEART_RATE:
        f = variant.x1 * nb + variant.x2
    elif variant.kind is ControlKind.SYSTEMIC_RESISTANCE:
        r = variant.x1 * nb + variant.x2
    elif variant.kind is ControlKind.UNSTRESSED_VOLUME:
        v_d = variant.x1 * b + variant.x2
    elif variant.kind is ControlKind.VENOUS_COMPLIANCE:
        c = variant.x1 * b + variant.x2
    p_sv = (v_sv - v_d) / c
    q_s = (100.0 * v_sa - p_sv) / r
    q_r = 0.035 * f * p_sv
    q_l = 7.0 / 40.0 * f * v_pv
    q_p = 84.0 * (5.0 - v_sa - v_sv - v_pv) - 7.0 * v_pv
    return q_l - q_s, q_s - q_r, q_p - q_l


class TestHillActivity(unittest.TestCase):

    def test_half_activity_at_critical_volume(self):
        for mu in (0.1, 1.0, 18.0, 250.0):
            with self.subTest(mu=mu):
                self.assertEqual(hill_activity(1.0, 1.0, mu), 0.5)

    def test_matches_power_law(self):
        # n = 4*mu = 1 gives v/(1+v)
        self.assertAlmostEqual(hill_activity(2.0, 1.0, 0.25), 2.0 / 3.0, places=15)
        self.assertAlmostEqual(hill_activity(0.5, 1.0, 0.5), 0.25 / 1.25, places=15)

    def test_slope_at_critical_volume_equals_gain(self):
        h = 1e-6
        for mu in (1.0, 10.0, 50.0):
            with self.subTest(mu=mu):
                slope = (hill_activity(1.0 + h, 1.0, mu) - hill_activity(1.0 - h, 1.0, mu)) / (2 * h)
                self.assertAlmostEqual(slope, mu, delta=1e-6 * mu)

    def test_saturates_without_overflow(self):
        self.assertEqual(hill_activity(1.5, 1.0, 5000.0), ACTIVITY_CEILING)
        self.assertLess(hill_activity(1.5, 1.0, 5000.0), 1.0)
        low = hill_activity(0.5, 1.0, 5000.0)
        self.assertGreaterEqual(low, 0.0)
        self.assertLess(low, 1e-300)

    def test_complement_keeps_precision_near_saturation(self):
        for v_sa, mu in ((1.0947, 40.6), (1.2, 50.0), (1.05, 100.0), (0.8, 20.0)):
            with self.subTest(v_sa=v_sa, mu=mu):
                exact = 1.0 / (1.0 + v_sa ** (4.0 * mu))
                self.assertAlmostEqual(hill_complement(v_sa, 1.0, mu), exact, delta=1e-13 * exact)
                self.assertAlmostEqual(hill_activity(v_sa, 1.0, mu) + hill_complement(v_sa, 1.0, mu), 1.0,
                                       places=15)
        # activity is pinned at the ceiling here, its complement is not
        self.assertEqual(hill_activity(1.2, 1.0, 60.0), ACTIVITY_CEILING)
        self.assertLess(hill_complement(1.2, 1.0, 60.0), 1.0 - ACTIVITY_CEILING)
        self.assertEqual(hill_complement(1.5, 1.0, 5000.0), COMPLEMENT_FLOOR)

    def test_rejects_nonpositive_inputs(self):
        for args in ((0.0, 1.0, 1.0), (-1.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0)):
            with self.subTest(args=args):
                with self.assertRaises(ModelDomainError):
                    hill_activity(*args)


class TestControlLaws(unittest.TestCase):

    def test_resting_activity_gives_base_value(self):
        for variant in NORMALIZED:
            with self.subTest(variant=variant.label()):
                self.assertAlmostEqual(control_value(variant, 0.5, PARAMS),
                                       PARAMS.base_value(variant.kind), places=12)

    def test_direction_of_each_law(self):
        hr = ControlVariant.heart_rate(80.0, 40.0)
        vd = ControlVariant.unstressed_volume(4.0, 0.0)
        self.assertEqual(control_value(hr, 0.0, PARAMS), 120.0)
        self.assertEqual(control_value(hr, 0.75, PARAMS), 60.0)
        self.assertEqual(control_value(vd, 0.0, PARAMS), 0.0)
        self.assertEqual(control_value(vd, 0.75, PARAMS), 3.0)

    def test_falling_law_uses_complement(self):
        rs = ControlVariant.systemic_resistance(35.0, 0.0)
        complement = hill_complement(1.2, 1.0, 60.0)
        b = hill_activity(1.2, 1.0, 60.0)
        self.assertEqual(control_value(rs, b, PARAMS, complement), 35.0 * complement)
        self.assertEqual(control_value(rs, 0.25, PARAMS), 35.0 * 0.75)

    def test_linear_model_controls_nothing(self):
        self.assertTrue(math.isnan(control_value(ControlVariant.linear(), 0.5, PARAMS)))

    def test_activity_outside_unit_interval(self):
        vd = ControlVariant.unstressed_volume(4.0, 0.0)
        for b in (-0.1, 1.0, 1.5):
            with self.subTest(b=b):
                with self.assertRaises(ModelDomainError):
                    control_value(vd, b, PARAMS)

    def test_constants_validated(self):
        with self.assertRaises(ModelDomainError):
            ControlVariant.unstressed_volume(0.0, 2.0)
        with self.assertRaises(ModelDomainError):
            ControlVariant.heart_rate(80.0, -1.0)

    def test_normalization(self):
        self.assertTrue(all(v.is_normalized(PARAMS) for v in NORMALIZED))
        off = ControlVariant.unstressed_volume(4.0, 1.0)
        self.assertAlmostEqual(off.normalization_gap(PARAMS), 1.0)
        with self.assertRaises(ModelDomainError):
            off.check_normalized(PARAMS)

    def test_pure_heart_rate_has_no_floor(self):
        v = ControlVariant.pure_heart_rate(160.0)
        self.assertEqual((v.kind, v.x1, v.x2), (ControlKind.HEART_RATE, 160.0, 0.0))
        self.assertTrue(v.is_normalized(PARAMS))


class TestRestingCoefficients(unittest.TestCase):
    """Default parameters fold into the rational coefficients of the closed-form systems."""

    def test_coefficients(self):
        p = PARAMS
        f_cl_cpv = p.f_base * p.c_l / p.c_pv
        table = {
            "1/(R_S C_SA)": (1.0 / (p.r_s_base * p.c_sa), 40.0 / 7.0),
            "1/(R_S C_SV)": (1.0 / (p.r_s_base * p.c_sv_base), 8.0 / 105.0),
            "F C_L/C_PV": (f_cl_cpv, 14.0),
            "1/(R_S C_SV) + F C_R/C_SV": (1.0 / (p.r_s_base * p.c_sv_base) + p.f_base * p.c_r / p.c_sv_base,
                                          80.0 / 21.0),
            "1/(R_P C_PA)": (1.0 / (p.r_p * p.c_pa), 84.0),
            "1/(R_P C_PV) + F C_L/C_PV": (1.0 / (p.r_p * p.c_pv) + f_cl_cpv, 21.0),
            "V_O/(R_P C_PA)": (p.v_o / (p.r_p * p.c_pa), 420.0),
        }
        for name, (got, want) in table.items():
            with self.subTest(coefficient=name):
                self.assertAlmostEqual(got, want, delta=1e-12 * want)


class TestVectorField(unittest.TestCase):

    def test_resting_state_is_equilibrium(self):
        for variant in NORMALIZED + (ControlVariant.linear(),):
            for mu in (1.0, 10.0, 100.0):
                with self.subTest(variant=variant.label(), mu=mu):
                    self.assertLess(residual_norm(PARAMS, variant, mu, RESTING_STATE), 1e-12)

    def test_matches_closed_form(self):
        rng = np.random.default_rng(7)
        for variant in NORMALIZED:
            for _ in range(100):
                v_sa = rng.uniform(0.5, 1.5)
                v_sv = rng.uniform(2.5, 4.5)
                v_pv = rng.uniform(0.2, 0.8)
                mu = rng.uniform(1.0, 100.0)
                got = rhs(PARAMS, variant, mu, VolumeState(v_sa, v_sv, v_pv))
                expected = reference_rhs(variant, mu, v_sa, v_sv, v_pv)
                for g, e in zip(got, expected):
                    self.assertAlmostEqual(g, e, delta=1e-12 * max(1.0, abs(e)))

    def test_linear_model_ignores_gain(self):
        state = VolumeState(1.05, 3.3, 0.45)
        linear = ControlVariant.linear()
        np.testing.assert_array_equal(rhs(PARAMS, linear, 1.0, state), rhs(PARAMS, linear, 40.0, state))

    def test_volume_is_conserved(self):
        # dv_pa/dt = q_r - q_p, so the four compartment rates sum to zero
        state = VolumeState(1.1, 3.2, 0.45)
        variant = ControlVariant.venous_compliance(1.0, 0.25)
        obs = observables(PARAMS, variant, 30.0, state)
        derivative = rhs(PARAMS, variant, 30.0, state)
        self.assertAlmostEqual(derivative.sum() + (obs.q_r - obs.q_p), 0.0, places=12)

    def test_nonpositive_arterial_volume_rejected(self):
        from core.model import make_vector_field
        field = make_vector_field(PARAMS, ControlVariant.unstressed_volume(4.0, 0.0), 10.0)
        with self.assertRaises(ModelDomainError):
            field(0.0, 3.5, 0.4)


class TestObservables(unittest.TestCase):

    def test_resting_values(self):
        obs = observables(PARAMS, ControlVariant.unstressed_volume(4.0, 0.0), 10.0, RESTING_STATE)
        self.assertAlmostEqual(obs.p_sa, 100.0, places=10)
        self.assertAlmostEqual(obs.p_sv, 2.0, places=10)
        self.assertAlmostEqual(obs.p_pa, 15.0, places=8)
        self.assertAlmostEqual(obs.p_pv, 5.0, places=10)
        self.assertAlmostEqual(obs.b, 0.5)
        for flow in (obs.q_l, obs.q_r, obs.q_s, obs.q_p, obs.cardiac_output):
            self.assertAlmostEqual(flow, 5.6, places=8)

    def test_inadmissible_state(self):
        with self.assertRaises(ModelDomainError):
            observables(PARAMS, ControlVariant.linear(), 0.0, VolumeState(2.0, 3.0, 0.5))

    def test_state_components_must_be_positive(self):
        with self.assertRaises(ModelDomainError):
            VolumeState(1.0, 0.0, 0.4)
        with self.assertRaises(ModelDomainError):
            VolumeState(1.0, 3.5, math.nan)


if __name__ == "__main__":
    unittest.main()
