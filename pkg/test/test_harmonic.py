import unittest

import numpy as np
from solharm import harmonic, tree
from solharm.dynsys import SystemSpec, apply_r
from solharm.errors import RegularityError, SolharmError
from solharm.filter import bundled_filter, rw_harmonic_solve
from solharm.harmonic import NodeFunction
from solharm.random import PCG64
from solharm.util import enable_debug


ROOT = 0.1234477851


class TestNodeFunction(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.T = tree.build_tree(cls.sys, bundled_filter("haar"), ROOT, 3)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            NodeFunction(self.T, np.zeros(3), "additive")
        with self.assertRaises(ValueError):
            NodeFunction(self.T, np.zeros(len(self.T)), "super-harmonic")

    def test_immutable(self):
        f = NodeFunction(self.T, np.zeros(len(self.T)))
        with self.assertRaises(ValueError):
            f.values[0] = 1.0

    def test_residuals(self):
        f = harmonic.nu0(self.T)
        self.assertLess(f.residuals().max(), 1e-14)
        self.assertEqual(f.residuals("generic").max(), 0.0)
        g = NodeFunction(self.T, np.ones(len(self.T)), "additive")
        np.testing.assert_allclose(g.residuals()[0], 1.0)
        self.assertEqual(g.residuals()[-1], 0.0)


class TestCorrespondence(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.T = tree.build_tree(cls.sys, bundled_filter("haar"), ROOT, 6)
        cls.other = tree.build_tree(cls.sys, bundled_filter("haar"), ROOT, 6)

    def test_harmonic_round_trip(self):
        rng = PCG64(0)
        for _ in range(20):
            nu = harmonic.random_additive(self.T, rng)
            self.assertTrue(harmonic.validate(nu).ok)
            u = harmonic.additive_to_harmonic(self.T, nu)
            self.assertTrue(harmonic.validate(u).ok)
            back = harmonic.harmonic_to_additive(self.T, u)
            np.testing.assert_allclose(back.values, nu.values, rtol=1e-12)

    def test_weight_round_trip(self):
        rng = PCG64(1)
        for mass in (1.0, 2.5):
            U = harmonic.random_weight(self.T, rng)
            self.assertTrue(harmonic.validate(U).ok)
            nu = harmonic.weight_to_additive(self.T, U, mass)
            self.assertEqual(nu[0], mass)
            back = harmonic.additive_to_weight(self.T, nu)
            np.testing.assert_allclose(back.values, U.values, rtol=1e-12)

    def test_martin_represent(self):
        nu = harmonic.random_additive(self.T, PCG64(2))
        np.testing.assert_allclose(harmonic.martin_represent(self.T, nu).values,
                                   harmonic.additive_to_harmonic(self.T, nu).values)

    def test_nu0(self):
        u = harmonic.additive_to_harmonic(self.T, harmonic.nu0(self.T))
        np.testing.assert_allclose(u.values, 1.0)
        W = harmonic.additive_to_weight(self.T, harmonic.nu0(self.T))
        np.testing.assert_allclose(W.values[1:], self.T.W[1:])

    def test_quotient(self):
        u = harmonic.additive_to_harmonic(self.T, harmonic.random_additive(self.T, PCG64(3)))
        nu, nu0 = harmonic.harmonic_quotient(self.T, u)
        np.testing.assert_allclose(nu.values / nu0.values, u.values, rtol=1e-12)

    def test_cylinder(self):
        nu = harmonic.cylinder_additive(self.T, 4, 2.0)
        self.assertTrue(harmonic.validate(nu).ok)
        self.assertEqual(nu[0], 2.0)
        self.assertEqual(nu[2], 0.0)
        u = harmonic.additive_to_harmonic(self.T, nu)
        np.testing.assert_allclose(u[4], 2.0 * self.T.C[4])

    def test_refused(self):
        bad = NodeFunction(self.T, np.linspace(1, 2, len(self.T)), "additive")
        with self.assertRaises(SolharmError):
            harmonic.additive_to_harmonic(self.T, bad)
        neg = NodeFunction(self.T, -np.ones(len(self.T)), "p-harmonic")
        with self.assertRaises(SolharmError):
            harmonic.harmonic_to_additive(self.T, neg)
        with self.assertRaises(ValueError):
            harmonic.additive_to_harmonic(self.other, harmonic.nu0(self.T))


class TestFamily(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.haar = bundled_filter("haar")
        cls.d4 = bundled_filter("d4")
        x = ROOT / 4
        cls.roots = [x, apply_r(cls.sys, x), apply_r(cls.sys, apply_r(cls.sys, x))]

    def test_constant(self):
        rep = harmonic.rw_harmonic_family(self.sys, self.haar, lambda t: np.ones(np.shape(t)),
                                          self.roots, 5)
        self.assertEqual(rep.nested, 2)
        self.assertEqual(rep.depth, 4)
        self.assertTrue(rep.passed(1e-12))

    def test_solved(self):
        for h in rw_harmonic_solve(self.d4, self.sys, 6):
            rep = harmonic.rw_harmonic_family(self.sys, self.d4, h, self.roots, 5)
            self.assertTrue(rep.passed(1e-9))

    def test_not_harmonic(self):
        rep = harmonic.rw_harmonic_family(self.sys, self.haar,
                                          lambda t: np.cos(2 * np.pi * t), self.roots, 5)
        self.assertGreater(rep.additivity, 0.01)
        self.assertFalse(rep.passed(1e-9))

    def test_periodic_root(self):
        with self.assertRaises(RegularityError):
            harmonic.rw_harmonic_family(self.sys, self.haar, np.cos, [1/3], 3)

    def test_orbit_hits_zero(self):
        # W vanishes at r(1/4) = 1/2, while T(1/4) itself is regular
        self.assertTrue(tree.check_regular(self.sys, self.haar, 0.25, 4).regular)
        with self.assertRaises(RegularityError) as cm:
            harmonic.rw_harmonic_family(self.sys, self.haar,
                                        lambda t: np.ones(np.shape(t)), [0.25], 4)
        self.assertIn("r^1(x0) = 0.5", cm.exception.witness)


if __name__ == "__main__":
    enable_debug()
    unittest.main()
