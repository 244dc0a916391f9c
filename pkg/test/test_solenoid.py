import unittest

import numpy as np
from solharm import solenoid
from solharm.dynsys import ArcSet, SystemSpec, apply_r
from solharm.errors import SolharmError, TruncationError
from solharm.filter import bundled_filter
from solharm.solenoid import ArcCylinder, Constant, Pi, SolenoidBatch, SolenoidSample, Theta
from solharm.util import enable_debug


class TestWindow(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.haar = bundled_filter("haar")
        cls.Z = solenoid.sample_mu_inf_batch(cls.sys, cls.haar, 1000,
                                             length=16, forward=4, seed=0)

    def test_shape(self):
        self.assertEqual(self.Z.window.shape, (1000, 21))
        self.assertEqual(self.Z.origin, 4)
        self.assertEqual(self.Z.forward_budget, 4)
        self.assertEqual(self.Z.length, 16)

    def test_compatible(self):
        for m in range(-3, 16):
            np.testing.assert_allclose(apply_r(self.sys, self.Z.theta(m + 1)),
                                       self.Z.theta(m), atol=1e-12)

    def test_shift(self):
        z = self.Z[0]
        y = solenoid.r_inf(z, "forward")
        self.assertEqual(y.theta(0), apply_r(self.sys, z.theta(0)))
        self.assertEqual(solenoid.r_inf(y, "backward").theta(0), z.theta(0))
        np.testing.assert_array_equal(self.Z.shift(-3).theta(0), self.Z.theta(3))

    def test_truncation(self):
        with self.assertRaises(TruncationError):
            self.Z.theta(17)
        with self.assertRaises(TruncationError):
            self.Z.shift(5)
        with self.assertRaises(TruncationError):
            self.Z.shift(-17)

    def test_reproducible(self):
        Y = solenoid.sample_mu_inf_batch(self.sys, self.haar, 1000,
                                         length=16, forward=4, seed=0)
        np.testing.assert_array_equal(Y.window, self.Z.window)

    def test_hand_built(self):
        z = SolenoidSample(self.sys, np.array([2/3, 1/3, 1/6, 1/12]), 1)
        self.assertEqual(z.theta(-1), 2/3)
        self.assertEqual(z.prefix().points, (1/3, 1/6, 1/12))
        np.testing.assert_allclose(solenoid.sample_cocycle_mod2(self.haar, z, 1), 0.5)
        np.testing.assert_allclose(solenoid.sample_cocycle_mod2(self.haar, z, -1), 1 / 1.5)
        with self.assertRaises(TruncationError):
            solenoid.sample_cocycle_mod2(self.haar, z, 3)
        with self.assertRaises(ValueError):
            SolenoidSample(self.sys, np.zeros((2, 2)), 0)


class TestOperators(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.d4 = bundled_filter("d4")
        cls.Z = solenoid.sample_mu_inf_batch(cls.sys, cls.d4, 500,
                                             length=8, forward=4, seed=1)
        cls.xi = Theta(lambda t: np.exp(2j * np.pi * t), 1)

    def test_inverse(self):
        U = solenoid.U(self.d4)
        Ui = solenoid.U_inv(self.d4)
        np.testing.assert_allclose((Ui @ U)(self.xi)(self.Z), self.xi(self.Z), rtol=1e-10)
        np.testing.assert_allclose((U @ Ui)(self.xi)(self.Z), self.xi(self.Z), rtol=1e-10)

    def test_scaling_equation(self):
        phi = Constant(1.0)
        np.testing.assert_allclose(solenoid.U(self.d4)(phi)(self.Z),
                                   Pi(self.d4.m0)(phi)(self.Z))

    def test_covariance(self):
        g = lambda t: np.cos(2 * np.pi * t) + 0.5 * np.sin(6 * np.pi * t)
        U = solenoid.U(self.d4)
        Ui = solenoid.U_inv(self.d4)
        lhs = (U @ Pi(g) @ Ui)(self.xi)(self.Z)
        rhs = Pi(lambda t: g(apply_r(self.sys, t)))(self.xi)(self.Z)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-12)

    def test_cylinder(self):
        c = ArcCylinder([ArcSet([(0.0, 0.5)]), ArcSet([(0.25, 0.75)])])
        v = c(self.Z)
        expect = ((self.Z.theta(0) < 0.5) &
                  (0.25 <= self.Z.theta(1)) & (self.Z.theta(1) < 0.75))
        np.testing.assert_array_equal(v, expect.astype(float))


class TestExpectation(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.haar = bundled_filter("haar")
        cls.d4 = bundled_filter("d4")

    def test_constant(self):
        est = solenoid.mc_expectation(self.sys, self.haar, Constant(2.0), 1000, seed=0)
        self.assertEqual(est.mean, 2.0)
        self.assertEqual(est.stderr, 0.0)
        self.assertTrue(est.within(2.0))

    def test_theta0(self):
        est = solenoid.mc_expectation(self.sys, self.haar,
                                      Theta(lambda t: np.cos(2 * np.pi * t)), 50000, seed=2)
        self.assertTrue(est.within(0.0))

    def test_marginal(self):
        for m in (0, 1, 2):
            with self.subTest(m=m):
                est = solenoid.theta_marginal_check(
                    self.sys, self.d4, lambda t: np.cos(2 * np.pi * t), m, 50000, 3 + m)
                self.assertTrue(est.within(0.0))

    def test_isometry(self):
        xi = Theta(lambda t: np.cos(2 * np.pi * t), 0)
        Uxi = solenoid.U(self.haar)(xi)
        v = solenoid.mc_values(self.sys, self.haar,
                               lambda Z: np.abs(Uxi(Z)) ** 2 - np.abs(xi(Z)) ** 2,
                               50000, 4)
        self.assertLess(abs(v.mean()), 4 * v.std(ddof=1) / np.sqrt(v.shape[0]))

    def test_not_finite(self):
        with self.assertRaises(SolharmError):
            solenoid.mc_values(self.sys, self.haar,
                               lambda Z: np.full(len(Z), np.inf), 10, 0)

    def test_forward_product(self):
        x = np.array([0.1, 0.3])
        np.testing.assert_allclose(solenoid.forward_product(self.haar, x, 2),
                                   self.haar.abs2(x) * self.haar.abs2(2 * x))
        np.testing.assert_allclose(solenoid.forward_product(self.haar, x, 0), 1.0)


if __name__ == "__main__":
    enable_debug()
    unittest.main()
