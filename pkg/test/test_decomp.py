import unittest

import numpy as np
from solharm import decomp, solenoid
from solharm.decomp import FiberVector
from solharm.dynsys import ArcSet, Expansion, SystemSpec, apply_r, sample_expansion
from solharm.errors import FilterZeroError, SolharmError, TruncationError
from solharm.filter import bundled_filter, lyapunov
from solharm.random import PCG64
from solharm.solenoid import ArcCylinder, SolenoidBatch, SolenoidSample
from solharm.util import enable_debug


class TestFiber(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.haar = bundled_filter("haar")
        cls.d4 = bundled_filter("d4")
        cls.third = SolenoidSample(cls.sys, np.array([2/3, 1/3, 1/6, 1/12]), 1)
        cls.z = solenoid.sample_mu_inf(cls.sys, cls.d4, length=6, forward=5, seed=3)

    def _random(self, lo, hi, seed):
        v = PCG64(seed).normal(shape=(2, hi - lo + 1))
        return v[0] + 1j * v[1]

    def test_delta_third(self):
        d1 = FiberVector.delta(self.third, self.haar, 1, -2, 1)
        np.testing.assert_allclose(decomp.fiber_inner(d1, d1), 0.5)
        dm = FiberVector.delta(self.third, self.haar, -1, -2, 1)
        np.testing.assert_allclose(decomp.fiber_norm(dm) ** 2, 1 / 1.5)
        self.assertEqual(decomp.fiber_inner(d1, dm), 0.0)

    def test_range(self):
        with self.assertRaises(TruncationError):
            FiberVector(self.third, self.haar, [1, 1, 1], 0)
        with self.assertRaises(TruncationError):
            FiberVector(self.third, self.haar, [], 0)
        v = FiberVector(self.third, self.haar, [1, 2, 3], -1)
        self.assertEqual(v.hi, 1)
        self.assertEqual(v[0], 2)
        with self.assertRaises(TruncationError):
            v[2]
        self.assertEqual(v.restrict(0, 1).lo, 0)

    def test_null_set(self):
        z = SolenoidSample(self.sys, np.array([0.0, 0.0, 0.5]), 1)
        with self.assertRaises(FilterZeroError):
            FiberVector(z, self.haar, [1, 1], -1)

    def test_mismatch(self):
        a = FiberVector(self.z, self.d4, [1, 2], 0)
        b = FiberVector(self.z, self.d4, [1, 2], -1)
        with self.assertRaises(SolharmError):
            decomp.fiber_inner(a, b)

    def test_U_norm(self):
        e = self._random(-5, 5, 0)
        e[0] = 0.0
        v = FiberVector(self.z, self.d4, e, -5)
        Uv = decomp.fiber_U(v)
        self.assertEqual((Uv.lo, Uv.hi), (-5, 4))
        np.testing.assert_allclose(decomp.fiber_norm(Uv), decomp.fiber_norm(v), rtol=1e-12)

    def test_U_inv_norm(self):
        e = self._random(-5, 5, 1)
        e[-1] = 0.0
        v = FiberVector(self.z, self.d4, e, -5)
        Uiv = decomp.fiber_U_inv(v)
        self.assertEqual((Uiv.lo, Uiv.hi), (-4, 5))
        np.testing.assert_allclose(decomp.fiber_norm(Uiv), decomp.fiber_norm(v), rtol=1e-12)

    def test_inverse(self):
        v = FiberVector(self.z, self.d4, self._random(-5, 5, 2), -5)
        w = decomp.fiber_U(decomp.fiber_U_inv(v))
        np.testing.assert_allclose(w.entries, v.restrict(-4, 4).entries, rtol=1e-12)

    def test_covariance(self):
        g = lambda t: np.cos(2 * np.pi * t)
        v = FiberVector(self.z, self.d4, self._random(-5, 5, 3), -5)
        lhs = decomp.fiber_U(decomp.fiber_pi(g, decomp.fiber_U_inv(v)))
        rhs = decomp.fiber_pi(lambda t: g(apply_r(self.sys, t)), v).restrict(-4, 4)
        np.testing.assert_allclose(lhs.entries, rhs.entries, rtol=1e-10, atol=1e-12)

    def test_empty_output(self):
        v = FiberVector(self.z, self.d4, [1.0], 0)
        with self.assertRaises(TruncationError):
            decomp.fiber_U(v)
        with self.assertRaises(TruncationError):
            decomp.fiber_U_inv(v)


class TestPeriodic(unittest.TestCase):
    def test_sampled(self):
        sys = SystemSpec("circle", 2)
        Z = solenoid.sample_mu_inf_batch(sys, bundled_filter("haar"), 20, seed=4)
        for i in range(len(Z)):
            self.assertTrue(decomp.non_periodic(Z[i]).non_periodic)

    def test_period_two(self):
        sys = SystemSpec("circle", 2)
        z = SolenoidSample(sys, np.array([1/3, 2/3] * 8), 2)
        rep = decomp.non_periodic(z)
        self.assertIsInstance(rep, decomp.PeriodReport)
        self.assertIn("PeriodReport", decomp.__all__)
        self.assertFalse(rep.non_periodic)
        self.assertEqual(rep.period, 2)


class TestBirkhoff(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.haar = bundled_filter("haar")

    def test_periodic_orbit(self):
        np.testing.assert_allclose(decomp.birkhoff_sum(self.sys, self.haar, 1/3, 10),
                                   np.log(0.5), rtol=1e-10)

    def test_typical(self):
        n = 4000
        v = [decomp.birkhoff_sum(self.sys, self.haar,
                                 sample_expansion(self.sys, n + 64, s), n)
             for s in range(20)]
        np.testing.assert_allclose(np.mean(v), lyapunov(self.haar, self.sys).value, atol=0.05)

    def test_zero(self):
        with self.assertRaises(FilterZeroError):
            decomp.birkhoff_sum(self.sys, self.haar, 0.25, 3)

    def test_constant(self):
        f = bundled_filter("constant")
        self.assertEqual(decomp.birkhoff_sum(self.sys, f, 0.3, 5), 0.0)

    def test_short_expansion(self):
        with self.assertRaises(TruncationError):
            decomp.birkhoff_sum(self.sys, self.haar, Expansion(2, [1] * 60), 10)


class TestVisit(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.haar = bundled_filter("haar")
        cls.A0 = ArcSet([(0.4, 0.6)])
        cls.p = [decomp.visit_probability(cls.sys, cls.haar, cls.A0, m) for m in range(1, 11)]

    def test_whole_circle(self):
        for m in (1, 4):
            np.testing.assert_allclose(
                decomp.visit_probability(self.sys, self.haar, ArcSet.whole(), m),
                1.0, atol=1e-9)

    def test_decreasing(self):
        p = np.asarray(self.p)
        self.assertTrue(np.all(p > 0))
        self.assertTrue(np.all(np.diff(p[2:]) < 0))

    def test_decay_rate(self):
        fit = decomp.fit_decay_rate(range(3, 11), self.p[2:])
        self.assertLess(fit.slope, np.log(0.95))
        self.assertLess(fit.b, 0.95)
        np.testing.assert_allclose(fit.slope, np.log(fit.b))

    def test_constant_filter(self):
        f = bundled_filter("constant")
        for m in (1, 5):
            np.testing.assert_allclose(decomp.visit_probability(self.sys, f, self.A0, m),
                                       0.2, atol=1e-12)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            decomp.visit_probability(self.sys, self.haar, self.A0, 0)
        with self.assertRaises(ValueError):
            decomp.fit_decay_rate([1], [0.5])
        with self.assertRaises(ValueError):
            decomp.fit_decay_rate([1, 2], [0.5, 0.0])

    def test_audit(self):
        strict = decomp.audit_threshold(self.sys, self.haar, self.A0, 3, 0.5, 10)
        loose = decomp.audit_threshold(self.sys, self.haar, self.A0, 3, 0.9, 10)
        self.assertEqual(strict.total, loose.total)
        self.assertGreater(strict.total, 0)
        self.assertGreaterEqual(strict.violations, loose.violations)
        self.assertLessEqual(loose.fraction, 1.0)
        with self.assertRaises(ValueError):
            decomp.audit_threshold(self.sys, self.haar, self.A0, 0, 0.5, 10)


class TestShift(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.haar = bundled_filter("haar")
        cls.B0 = ArcSet.parse("0,0.4;0.6,1")

    def test_classes(self):
        Z = SolenoidBatch(self.sys, np.array([[0.1, 0.2, 0.5, 0.1],
                                              [0.5, 0.1, 0.1, 0.1],
                                              [0.1, 0.1, 0.1, 0.1],
                                              [0.1, 0.1, 0.1, 0.5]]), 1)
        k = decomp.shift_classes(Z, self.B0)
        np.testing.assert_array_equal(k, [2, 0, decomp.BELOW, decomp.UNDECIDED])

    def test_histogram(self):
        n = 20000
        h = decomp.domain_shift_stat(self.sys, self.haar, self.B0, n, 2, 5)
        self.assertEqual(h.counts.shape, (3,))
        np.testing.assert_allclose(h.counts.sum() + h.undecided * n, n)
        p = decomp.visit_probability(self.sys, self.haar, self.B0.complement(), 2)
        self.assertLess(abs(h.undecided * n - n * p) / np.sqrt(n * p * (1 - p)), 5.0)
        self.assertEqual(set(h.to_dict()), {"counts", "undecided", "samples"})

    def test_undecided_decreasing(self):
        u = [decomp.domain_shift_stat(self.sys, self.haar, self.B0, 20000, L, 6).undecided
             for L in (2, 16)]
        self.assertGreater(u[0], u[1])

    def test_psi_isometry(self):
        xi = ArcCylinder([ArcSet([(0.05, 0.2)]), ArcSet([(0.02, 0.3)])])
        rep = decomp.psi_isometry_check(self.sys, self.haar, xi, self.B0,
                                        range(-2, 3), 20000, 7)
        self.assertTrue(rep.passed)
        self.assertGreater(rep.lhs.mean.real, 0.0)
        self.assertLess(rep.undecided, 0.01)

    def test_psi_invalid(self):
        xi = ArcCylinder([ArcSet([(0.05, 0.2)])])
        with self.assertRaises(ValueError):
            decomp.psi_isometry_check(self.sys, self.haar, xi, self.B0, [], 10, 0)
        with self.assertRaises(TruncationError):
            decomp.psi_isometry_check(self.sys, self.haar, xi, self.B0, range(0, 10), 10, 0)


if __name__ == "__main__":
    enable_debug()
    unittest.main()
