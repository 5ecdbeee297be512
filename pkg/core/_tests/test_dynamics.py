import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))
from core.bifurcation import find_crossing
from core.dynamics import detect_cycle, integrate, step_count
from core.errors import StepSizeError, TrajectoryTooShortError
from core.types import CardioParams, ControlVariant, CycleKind, RESTING_STATE, Trajectory, VolumeState

PARAMS = CardioParams()
VD = ControlVariant.unstressed_volume(4.0, 0.0)
MU_STAR = 17.7602

# crossing gain of each unstressed-volume and venous-compliance preset
# fmt: off
CROSSINGS = (
    (ControlVariant.unstressed_volume(4.0, 0.0), 17.7602),
    (ControlVariant.unstressed_volume(3.0, 0.5), 23.6803),
    (ControlVariant.unstressed_volume(2.0, 1.0), 35.5205),
    (ControlVariant.unstressed_volume(1.0, 1.5), 71.0410),
    (ControlVariant.venous_compliance(1.5, 0.0), 23.6803),
    (ControlVariant.venous_compliance(1.0, 0.25), 35.5205),
    (ControlVariant.venous_compliance(0.5, 0.5), 71.0410),
)
# fmt: on


def synthetic(values, dt=1e-3):
    values = np.asarray(values, dtype=float)
    states = np.column_stack([values, np.full_like(values, 3.5), np.full_like(values, 0.4)])
    return Trajectory(times=np.arange(len(values)) * dt, states=states, dt=dt,
                      t_end=(len(values) - 1) * dt)


class TestIntegrate(unittest.TestCase):

    def test_grid(self):
        traj = integrate(PARAMS, VD, 10.0, VolumeState(1.0, 3.4, 0.5), dt=4e-4, t_end=0.1)
        self.assertEqual(len(traj), step_count(4e-4, 0.1) + 1)
        self.assertEqual(len(traj), 251)
        self.assertEqual(traj.states.shape, (251, 3))
        self.assertAlmostEqual(traj.times[-1], 0.1, places=12)
        self.assertEqual(traj.states[0].tolist(), [1.0, 3.4, 0.5])

    def test_equilibrium_stays_put(self):
        stable = (
            (VD, 15.0),
            (ControlVariant.heart_rate(80.0, 40.0), 50.0),
            (ControlVariant.systemic_resistance(35.0, 0.0), 50.0),
            (ControlVariant.linear(), 1.0),
        )
        for variant, mu in stable:
            with self.subTest(variant=variant.label(), mu=mu):
                traj = integrate(PARAMS, variant, mu, RESTING_STATE, dt=1e-4, t_end=5.0)
                drift = np.max(np.abs(traj.states - np.array(RESTING_STATE.as_tuple())))
                self.assertLess(drift, 1e-9)

    def test_fourth_order_convergence(self):
        start = VolumeState(1.0, 3.4, 0.5)
        finals = [integrate(PARAMS, VD, 10.0, start, dt=dt, t_end=0.1).states[-1]
                  for dt in (4e-4, 2e-4, 1e-4)]
        coarse = np.max(np.abs(finals[0] - finals[1]))
        fine = np.max(np.abs(finals[1] - finals[2]))
        self.assertGreater(coarse / fine, 10.0)
        self.assertLess(coarse / fine, 24.0)

    def test_step_too_coarse(self):
        with self.assertRaises(StepSizeError) as ctx:
            integrate(PARAMS, VD, 10.0, VolumeState(1.0, 3.5, 0.401), dt=0.05, t_end=5.0)
        self.assertGreater(ctx.exception.discrepancy, 1e-6)

    def test_horizon_too_short(self):
        with self.assertRaises(ValueError):
            integrate(PARAMS, VD, 10.0, RESTING_STATE, dt=1e-3, t_end=0.05)
        with self.assertRaises(ValueError):
            integrate(PARAMS, VD, 10.0, RESTING_STATE, dt=0.0, t_end=1.0)


class TestPhasePortraits(unittest.TestCase):
    """Below and above the crossing of the unstressed-volume loop."""

    def test_below_crossing_spirals_in(self):
        traj = integrate(PARAMS, VD, 10.0, VolumeState(1.0, 3.4, 0.5), dt=1e-4, t_end=10.0)
        report = detect_cycle(traj)
        self.assertIs(report.classification, CycleKind.DECAYING)
        self.assertLess(report.amplitude, 1e-5)

    def test_above_crossing_settles_on_one_cycle(self):
        reports = []
        for start in (VolumeState(1.0, 3.47, 0.39), VolumeState(1.0, 3.4, 0.5)):
            traj = integrate(PARAMS, VD, 20.0, start, dt=1e-4, t_end=10.0)
            reports.append(detect_cycle(traj))
        for report in reports:
            self.assertIs(report.classification, CycleKind.SUSTAINED)
            self.assertAlmostEqual(report.amplitude, 3.627e-2, delta=1e-3)
            self.assertGreaterEqual(report.period_s, 7.0)
            self.assertLessEqual(report.period_s, 12.0)
        a, b = (r.amplitude for r in reports)
        self.assertLess(abs(a - b), 0.02 * max(a, b))
        self.assertLess(abs(reports[0].period_s - reports[1].period_s), 0.02 * reports[0].period_s)

    def test_period_matches_crossing_frequency(self):
        crossing = find_crossing(PARAMS, VD, 10.0, 30.0)
        traj = integrate(PARAMS, VD, 20.0, VolumeState(1.0, 3.47, 0.39), dt=1e-4, t_end=10.0)
        report = detect_cycle(traj)
        self.assertIs(report.classification, CycleKind.SUSTAINED)
        linear_period = 60.0 * 2.0 * np.pi / crossing.omega_star
        self.assertLess(abs(report.period_s - linear_period), 0.15 * linear_period)


class TestSupercriticality(unittest.TestCase):
    """Small stable cycles appear just past every crossing, none just before it."""

    def test_each_crossing(self):
        start = VolumeState(1.01, 3.5, 0.4)
        for variant, mu_star in CROSSINGS:
            with self.subTest(variant=variant.label()):
                below = detect_cycle(integrate(PARAMS, variant, 0.95 * mu_star, start, dt=1e-3, t_end=40.0))
                above = detect_cycle(integrate(PARAMS, variant, 1.05 * mu_star, start, dt=1e-3, t_end=40.0))
                self.assertIs(below.classification, CycleKind.DECAYING)
                self.assertIs(above.classification, CycleKind.SUSTAINED)
                self.assertLess(above.amplitude, 0.05)


class TestDetectCycle(unittest.TestCase):

    def test_sine_wave(self):
        t = np.arange(0.0, 10.0, 1e-3)
        report = detect_cycle(synthetic(1.0 + 0.01 * np.sin(2.0 * np.pi * t / 0.12)))
        self.assertIs(report.classification, CycleKind.SUSTAINED)
        self.assertAlmostEqual(report.period_s, 7.2, delta=1e-2)
        self.assertAlmostEqual(report.amplitude, 0.02, delta=1e-4)

    def test_constant_signal_is_inconclusive(self):
        report = detect_cycle(synthetic(np.ones(1000)))
        self.assertIs(report.classification, CycleKind.INCONCLUSIVE)
        self.assertEqual(report.amplitude, 0.0)
        self.assertIsNone(report.period_s)

    def test_few_small_peaks_are_inconclusive(self):
        t = np.arange(0.0, 1.0, 1e-3)
        report = detect_cycle(synthetic(1.0 + 4e-6 * np.exp(-t) * np.sin(2.0 * np.pi * t / 0.12)))
        self.assertLess(len(report.peak_times) + 1, 6)
        self.assertLess(report.amplitude, 1e-5)
        self.assertIs(report.classification, CycleKind.INCONCLUSIVE)

    def test_small_decaying_oscillation(self):
        t = np.arange(0.0, 10.0, 1e-3)
        report = detect_cycle(synthetic(1.0 + 4e-6 * np.exp(-0.5 * t) * np.sin(2.0 * np.pi * t / 0.12)))
        self.assertIs(report.classification, CycleKind.DECAYING)
        self.assertGreater(len(report.peak_times), 20)

    def test_growing_oscillation_is_inconclusive(self):
        t = np.arange(0.0, 10.0, 1e-3)
        report = detect_cycle(synthetic(1.0 + 0.001 * np.exp(0.3 * t) * np.sin(2.0 * np.pi * t / 0.12)))
        self.assertIs(report.classification, CycleKind.INCONCLUSIVE)

    def test_too_few_peaks(self):
        t = np.arange(0.0, 1.0, 1e-3)
        report = detect_cycle(synthetic(1.0 + 0.01 * np.sin(2.0 * np.pi * t / 0.4)))
        self.assertIs(report.classification, CycleKind.INCONCLUSIVE)

    def test_transient_leaves_too_little(self):
        with self.assertRaises(TrajectoryTooShortError):
            detect_cycle(synthetic([1.0, 1.1, 1.0, 0.9]), transient_fraction=0.5)
        with self.assertRaises(ValueError):
            detect_cycle(synthetic(np.ones(10)), transient_fraction=1.0)


if __name__ == "__main__":
    unittest.main()
