import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))
from core.errors import ModelDomainError
from core.spectral import charpoly, classify_at_equilibrium, eig3, jacobian_fd, residual_bound
from core.types import CardioParams, ControlVariant, RESTING_STATE, SpectrumKind

PARAMS = CardioParams()


def resting_jacobian(a11, a21, a31=-84.0):
    """Jacobian at (1, 3.5, 0.4); only the v_sa column depends on the reflex."""
    return np.array([
        [a11, 8.0 / 105.0, 14.0],
        [a21, -80.0 / 21.0, 0.0],
        [a31, -84.0, -105.0],
    ])


class TestEig3(unittest.TestCase):

    def test_diagonal(self):
        spectrum = eig3(np.diag([-3.0, -1.0, -2.0]))
        self.assertIs(spectrum.kind, SpectrumKind.THREE_REAL)
        np.testing.assert_allclose([z.real for z in spectrum.eigenvalues], [-1.0, -2.0, -3.0], atol=1e-12)
        self.assertAlmostEqual(spectrum.real_eigenvalue, -1.0, places=12)
        self.assertFalse(spectrum.has_pair)

    def test_rotation_block(self):
        m = np.array([[0.0, -2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, -1.0]])
        spectrum = eig3(m)
        self.assertIs(spectrum.kind, SpectrumKind.REAL_PLUS_PAIR)
        self.assertAlmostEqual(spectrum.real_eigenvalue, -1.0, places=12)
        self.assertAlmostEqual(spectrum.pair_real_part, 0.0, places=12)
        self.assertAlmostEqual(spectrum.pair_imag_part, 2.0, places=12)

    def test_triple_root(self):
        spectrum = eig3(-np.eye(3))
        self.assertTrue(spectrum.degenerate)
        self.assertEqual(spectrum.eigenvalues, (-1 + 0j, -1 + 0j, -1 + 0j))

    def test_against_numpy(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            m = rng.normal(size=(3, 3)) * rng.uniform(0.1, 100.0)
            ours = eig3(m).eigenvalues
            ref = np.linalg.eigvals(m)
            scale = max(1.0, float(np.max(np.abs(ref))))
            for lam in ours:
                self.assertLess(float(np.min(np.abs(ref - lam))), 1e-6 * scale)

    def test_roots_satisfy_characteristic_polynomial(self):
        m = resting_jacobian(-40.0 / 7.0 - 8.0 * 4.0 * 20.0 / 105.0, 40.0 / 7.0 + 80.0 * 4.0 * 20.0 / 21.0)
        spectrum = eig3(m)
        for lam in spectrum.eigenvalues:
            self.assertLessEqual(abs(charpoly(spectrum.coefficients, lam)), residual_bound(lam))
        self.assertAlmostEqual(sum(spectrum.eigenvalues).real, np.trace(m), delta=1e-9 * abs(np.trace(m)))
        self.assertAlmostEqual(np.prod(spectrum.eigenvalues).real, np.linalg.det(m),
                               delta=1e-9 * abs(np.linalg.det(m)))

    def test_rejects_bad_input(self):
        with self.assertRaises(ModelDomainError):
            eig3(np.eye(2))
        with self.assertRaises(ModelDomainError):
            eig3(np.full((3, 3), np.nan))


class TestJacobian(unittest.TestCase):

    def assertJacobian(self, got, expected):
        for i in range(3):
            for j in range(3):
                e = expected[i, j]
                self.assertAlmostEqual(got[i, j], e, delta=1e-5 * max(1.0, abs(e)),
                                       msg=f"entry ({i + 1},{j + 1})")

    def test_unstressed_volume(self):
        for d1, d2 in ((4.0, 0.0), (3.0, 0.5), (2.0, 1.0), (1.0, 1.5)):
            variant = ControlVariant.unstressed_volume(d1, d2)
            for mu in (1.0, 10.0, 50.0):
                with self.subTest(d1=d1, mu=mu):
                    expected = resting_jacobian(-40.0 / 7.0 - 8.0 * d1 * mu / 105.0,
                                                40.0 / 7.0 + 80.0 * d1 * mu / 21.0)
                    self.assertJacobian(jacobian_fd(PARAMS, variant, mu, RESTING_STATE), expected)

    def test_venous_compliance(self):
        for c1, c2 in ((1.5, 0.0), (1.0, 0.25), (0.5, 0.5)):
            variant = ControlVariant.venous_compliance(c1, c2)
            for mu in (1.0, 10.0, 50.0):
                with self.subTest(c1=c1, mu=mu):
                    expected = resting_jacobian(-40.0 / 7.0 - 16.0 * c1 * mu / 105.0,
                                                40.0 / 7.0 + 160.0 * c1 * mu / 21.0)
                    self.assertJacobian(jacobian_fd(PARAMS, variant, mu, RESTING_STATE), expected)

    def test_venous_compliance_entry_is_80_mu_over_7(self):
        # written elsewhere as 40/7 + 80*mu/21; differentiating the law gives 80*mu/7
        variant = ControlVariant.venous_compliance(1.5, 0.0)
        for mu in (1.0, 10.0, 50.0):
            with self.subTest(mu=mu):
                got = jacobian_fd(PARAMS, variant, mu, RESTING_STATE)[1, 0]
                self.assertAlmostEqual(got, 40.0 / 7.0 + 80.0 * mu / 7.0, delta=1e-5 * got)
                self.assertGreater(abs(got - (40.0 / 7.0 + 80.0 * mu / 21.0)), 7.0 * mu)

    def test_same_linearization_for_matched_families(self):
        vd = jacobian_fd(PARAMS, ControlVariant.unstressed_volume(3.0, 0.5), 20.0, RESTING_STATE)
        csv = jacobian_fd(PARAMS, ControlVariant.venous_compliance(1.5, 0.0), 20.0, RESTING_STATE)
        np.testing.assert_allclose(vd, csv, rtol=1e-6, atol=1e-6)

    def test_heart_rate(self):
        variant = ControlVariant.heart_rate(80.0, 40.0)
        for mu in (1.0, 10.0, 50.0):
            with self.subTest(mu=mu):
                shift = 0.07 * 80.0 * mu
                expected = resting_jacobian(-40.0 / 7.0 - shift, 40.0 / 7.0 + shift, -84.0 + shift)
                self.assertJacobian(jacobian_fd(PARAMS, variant, mu, RESTING_STATE), expected)

    def test_systemic_resistance(self):
        variant = ControlVariant.systemic_resistance(20.0, 7.5)
        for mu in (1.0, 10.0, 50.0):
            with self.subTest(mu=mu):
                shift = 0.32 * 20.0 * mu
                expected = resting_jacobian(-40.0 / 7.0 - shift, 40.0 / 7.0 + shift)
                self.assertJacobian(jacobian_fd(PARAMS, variant, mu, RESTING_STATE), expected)


class TestClassification(unittest.TestCase):

    def test_unstressed_volume_below_and_above_crossing(self):
        variant = ControlVariant.unstressed_volume(4.0, 0.0)
        below = classify_at_equilibrium(PARAMS, variant, 10.0)
        above = classify_at_equilibrium(PARAMS, variant, 20.0)
        self.assertTrue(below.has_pair and above.has_pair)
        self.assertAlmostEqual(below.pair_real_part, -3.5047, delta=1e-3)
        self.assertAlmostEqual(above.pair_real_part, 0.832, delta=1e-2)
        self.assertLess(below.real_eigenvalue, -50.0)
        self.assertTrue(below.is_stable)
        self.assertFalse(above.is_stable)

    def test_linear_model_is_stable(self):
        spectrum = classify_at_equilibrium(PARAMS, ControlVariant.linear(), 1.0)
        self.assertLess(spectrum.leading_real_part, 0.0)


if __name__ == "__main__":
    unittest.main()
