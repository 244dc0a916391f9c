import unittest

import numpy as np
from solharm import dynsys
from solharm.dynsys import ArcSet, Expansion, SystemSpec, TreeSource
from solharm.errors import SolharmError, TruncationError
from solharm.util import enable_debug


class TestSystem(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.sys3 = SystemSpec("circle", 3)

    def test_apply_r(self):
        np.testing.assert_allclose(dynsys.apply_r(self.sys, 0.75), 0.5)
        np.testing.assert_allclose(dynsys.apply_r(self.sys3, [0.5, 0.9]), [0.5, 0.7])

    def test_preimages(self):
        np.testing.assert_allclose(dynsys.preimages(self.sys, 1/3), (1/6, 2/3))
        ys = dynsys.preimages(self.sys3, 0.3)
        np.testing.assert_allclose(ys, (0.1, 1.3 / 3, 2.3 / 3))
        for y in ys:
            self.assertTrue(dynsys.points_equal(self.sys3, dynsys.apply_r(self.sys3, y), 0.3))

    def test_preimages_exact(self):
        for x in (0.0, 0.375, 0.5, 0.1234375, 0.75 - 2.0 ** -40):
            for y in dynsys.preimages(self.sys, x):
                self.assertEqual(dynsys.apply_r(self.sys, y), x)
        for x in (0.3, 1/3, 0.1234477851):
            for y in dynsys.preimages(self.sys, x):
                self.assertTrue(dynsys.points_equal(self.sys, dynsys.apply_r(self.sys, y), x))

    def test_points_equal_exact(self):
        self.assertTrue(self.sys.exact)
        self.assertTrue(dynsys.points_equal(self.sys, 0.5, 0.5))
        self.assertTrue(dynsys.points_equal(self.sys, 0.0, 1.0))
        self.assertFalse(dynsys.points_equal(self.sys, 0.5, 0.5 + 1e-13))
        self.assertFalse(dynsys.points_equal(self.sys, 0.0, 1.0 - 1e-13))
        self.assertTrue(dynsys.points_equal(self.sys, 0.5, 0.5 + 1e-13, tol=1e-12))

    def test_points_equal_wrap(self):
        self.assertFalse(self.sys3.exact)
        self.assertTrue(dynsys.points_equal(self.sys3, 0.0, 1.0 - 1e-13))
        self.assertTrue(dynsys.points_equal(self.sys3, 0.5, 0.5 + 1e-13))
        self.assertFalse(dynsys.points_equal(self.sys3, 0.0, 1e-6))
        self.assertTrue(dynsys.points_close(1/3, 2 * (2 / 3) - 1))

    def test_invalid(self):
        with self.assertRaises(ValueError):
            SystemSpec("torus", 2)
        with self.assertRaises(ValueError):
            SystemSpec("circle", 0)
        with self.assertRaises(ValueError):
            SystemSpec("tree")

    def test_from_config(self):
        s = SystemSpec.from_config({"N": 3, "panels": 128})
        self.assertEqual(s, SystemSpec("circle", 3, panels=128))


class TestIntegral(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)

    def test_cos2(self):
        q = dynsys.integrate_mu(self.sys, lambda t: np.cos(np.pi * t) ** 2)
        np.testing.assert_allclose(q.value, 0.5, atol=1e-14)
        self.assertLess(q.error, 1e-12)

    def test_character(self):
        q = dynsys.integrate_mu(self.sys, lambda t: np.exp(2j * np.pi * 3 * t))
        self.assertLess(abs(q.value), 1e-14)

    def test_breakpoints(self):
        A = ArcSet([(0.2, 0.7)])
        q = dynsys.integrate_mu(self.sys, lambda t: A.contains(t).astype(float),
                                breakpoints=A.edges)
        np.testing.assert_allclose(q.value.real, 0.5, atol=1e-12)

    def test_not_finite(self):
        with self.assertRaises(SolharmError):
            dynsys.integrate_mu(self.sys, lambda t: np.full(np.shape(t), np.nan))

    def test_strong_invariance(self):
        for k in (1, 2, 3):
            f = lambda t, k=k: np.cos(2 * np.pi * k * t) + np.sin(2 * np.pi * t) ** 2
            self.assertLess(dynsys.strong_invariance_residual(self.sys, f), 1e-12)

    def test_tree_system_refused(self):
        src = TreeSource("o", {"o": ("a", "b")}, {"a": 0.5, "b": 0.5})
        with self.assertRaises(SolharmError):
            dynsys.integrate_mu(SystemSpec("tree", source=src), np.cos)


class TestSample(unittest.TestCase):
    def test_sample_mu(self):
        s = SystemSpec("circle", 2)
        x = dynsys.sample_mu(s, 0, 20000)
        self.assertTrue(((0 <= x) & (x < 1)).all())
        self.assertLess(abs(x.mean() - 0.5), 4 * np.sqrt(1 / 12 / 20000))
        np.testing.assert_array_equal(x, dynsys.sample_mu(s, 0, 20000))

    def test_sample_expansion(self):
        s = SystemSpec("circle", 3)
        e = dynsys.sample_expansion(s, 64, 1)
        self.assertEqual(len(e), 64)
        self.assertTrue(((0 <= e.digits) & (e.digits < 3)).all())


class TestExpansion(unittest.TestCase):
    def test_from_float(self):
        e = Expansion.from_float(0.625, 2, 60)
        np.testing.assert_array_equal(e.digits[:3], [1, 0, 1])
        np.testing.assert_array_equal(e.digits[3:], 0)
        self.assertEqual(e.value(), 0.625)

    def test_orbit(self):
        e = Expansion(2, [0, 1] * 60)
        o = e.orbit(10)
        np.testing.assert_allclose(o[0::2], 1/3, atol=1e-15)
        np.testing.assert_allclose(o[1::2], 2/3, atol=1e-15)

    def test_truncation(self):
        e = Expansion(2, [1] * 20)
        with self.assertRaises(TruncationError):
            e.orbit(1)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            Expansion(1, [0])
        with self.assertRaises(ValueError):
            Expansion(2, [0, 2])


class TestArcSet(unittest.TestCase):
    def test_parse(self):
        A = ArcSet.parse("0,0.45;0.55,1")
        np.testing.assert_allclose(A.measure(), 0.9)
        self.assertEqual(A.complement(), ArcSet([(0.45, 0.55)]))
        self.assertEqual(str(A.complement()), "0.45,0.55")

    def test_wrap(self):
        A = ArcSet([(0.9, 0.1)])
        np.testing.assert_allclose(A.measure(), 0.2)
        np.testing.assert_array_equal(A.contains([0.95, 0.05, 0.5]), [True, True, False])

    def test_merge(self):
        A = ArcSet([(0.1, 0.3), (0.2, 0.4)])
        self.assertEqual(A.arcs, ((0.1, 0.4),))

    def test_whole(self):
        A = ArcSet.whole()
        self.assertEqual(A.measure(), 1.0)
        self.assertEqual(A.complement().measure(), 0.0)
        self.assertTrue(A.contains(0.999999).all())

    def test_invalid(self):
        with self.assertRaises(ValueError):
            ArcSet.parse("0,0.5,0.7")
        with self.assertRaises(ValueError):
            ArcSet([(0.0, 1.5)])


class TestTreeSource(unittest.TestCase):
    def setUp(self):
        self.src = TreeSource("o",
                              {"o": ("a", "b"), "a": ("aa", "ab")},
                              {"a": 0.25, "b": 0.75, "aa": 0.5, "ab": 0.5})
        self.sys = SystemSpec("tree", source=self.src)

    def test_structure(self):
        self.assertEqual(dynsys.preimages(self.sys, "o"), ("a", "b"))
        self.assertEqual(dynsys.apply_r(self.sys, "ab"), "a")
        self.assertEqual(self.src.weight("b"), 0.75)
        self.assertEqual(self.src.weight("o"), 1.0)
        self.assertEqual(self.src.children("b"), ())

    def test_root_image(self):
        with self.assertRaises(TruncationError):
            dynsys.apply_r(self.sys, "o")

    def test_invalid_weights(self):
        with self.assertRaises(ValueError):
            TreeSource("o", {"o": ("a", "b")}, {"a": 0.25, "b": 0.25})
        with self.assertRaises(ValueError):
            TreeSource("o", {"o": ("a",), "b": ("a",)}, {"a": 1.0})


if __name__ == "__main__":
    enable_debug()
    unittest.main()
