import unittest

import numpy as np
from solharm import tree
from solharm.dynsys import SystemSpec, TreeSource
from solharm.errors import RegularityError, TruncationError
from solharm.filter import bundled_filter
from solharm.util import enable_debug


ROOT = 0.1234477851


class TestBuild(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.haar = bundled_filter("haar")
        cls.T = tree.build_tree(cls.sys, cls.haar, ROOT, 4)

    def test_size(self):
        self.assertEqual(len(self.T), 31)
        self.assertTrue(self.T.is_regular)
        np.testing.assert_array_equal(np.bincount(self.T.level), [1, 2, 4, 8, 16])

    def test_rows(self):
        rows = self.T.to_rows()
        self.assertEqual(len(rows), 31)
        self.assertEqual(rows[0][:3], (0, -1, 0))
        self.assertEqual(rows[0][5], 1.0)
        self.assertEqual(rows[0][6], 0.5)
        for i, p, d, x, W, Wn, D in rows[1:]:
            self.assertEqual(d, rows[p][2] + 1)
            np.testing.assert_allclose(Wn, W * rows[p][5])

    def test_children_order(self):
        for i in self.T.internal():
            c = [self.T.points[j] for j in self.T.children[i]]
            self.assertEqual(c, sorted(c))

    def test_locate(self):
        path = [self.T.points[k] for k in (0, 2, 6, 14)]
        self.assertEqual(self.T.locate(path), [0, 2, 6, 14])
        with self.assertRaises(ValueError):
            self.T.locate([0.5])

    def test_n3(self):
        sys3 = SystemSpec("circle", 3)
        T = tree.build_tree(sys3, bundled_filter("haar", 3), ROOT, 3)
        self.assertEqual(len(T), 1 + 3 + 9 + 27)

    def test_invalid_depth(self):
        with self.assertRaises(ValueError):
            tree.build_tree(self.sys, self.haar, ROOT, -1)


class TestRegularity(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.haar = bundled_filter("haar")

    def test_periodic(self):
        self.assertTrue(tree.check_regular(self.sys, self.haar, 1/3, 1).regular)
        rep = tree.check_regular(self.sys, self.haar, 1/3, 2)
        self.assertFalse(rep.regular)
        self.assertIn("period 2", rep.witness)

    def test_orbit(self):
        self.assertTrue(tree.check_orbit(self.sys, self.haar, ROOT, 6).regular)
        rep = tree.check_orbit(self.sys, self.haar, 0.25, 1)
        self.assertFalse(rep.regular)
        self.assertIn("at r^1(x0) = 0.5", rep.witness)
        rep = tree.check_orbit(self.sys, self.haar, 1/6, 4)
        self.assertFalse(rep.regular)
        self.assertIn("r^3(x0) = r^1(x0)", rep.witness)
        self.assertIn("period 2", rep.witness)

    def test_fixed_point(self):
        self.assertFalse(tree.check_regular(self.sys, self.haar, 0.0, 1).regular)

    def test_refused(self):
        T = tree.build_tree(self.sys, self.haar, 1/3, 3)
        with self.assertRaises(RegularityError):
            tree.green(T, 0, 1)
        with self.assertRaises(RegularityError):
            tree.martin_matrix(T)
        with self.assertRaises(RegularityError):
            tree.martin_metric(T, 0, 1)


class TestKernels(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sys = SystemSpec("circle", 2)
        cls.haar = bundled_filter("haar")
        cls.T = tree.build_tree(cls.sys, cls.haar, ROOT, 5)
        cls.third = tree.build_tree(cls.sys, cls.haar, 1/3, 3)

    def test_transition_third(self):
        T = self.third
        y = T.node(1/12)
        np.testing.assert_allclose(tree.transition_pn(T, 0, y, 2), 0.699759526, rtol=1e-9)
        self.assertEqual(tree.transition_pn(T, 0, y, 1), 0.0)
        np.testing.assert_allclose(T.C[T.node(1/6)], 4/3)
        with self.assertRaises(TruncationError):
            tree.transition_pn(T, 0, y, 4)

    def test_row_stochastic(self):
        P = tree.transition_matrix(self.T)
        inner = self.T.internal()
        np.testing.assert_allclose(P[inner].sum(axis=1), 1.0, atol=1e-14)

    def test_green_series(self):
        P = tree.transition_matrix(self.T)
        S = np.eye(len(self.T))
        Pk = np.eye(len(self.T))
        for _ in range(self.T.depth):
            Pk = Pk @ P
            S += Pk
        np.testing.assert_allclose(tree.green_matrix(self.T), S, atol=1e-12)
        self.assertEqual(tree.green(self.T, 5, 0), 0.0)

    def test_martin(self):
        T = self.T
        K = tree.martin_matrix(T)
        G = tree.green_matrix(T)
        for x in range(len(T)):
            for y in (0, 7, 40, len(T) - 1):
                if G[0, y] > 0:
                    np.testing.assert_allclose(K[x, y], G[x, y] / G[0, y], rtol=1e-12)
                    self.assertEqual(K[x, y], tree.martin_kernel(T, x, y))
        np.testing.assert_allclose(K[0], 1.0)

    def test_metric(self):
        T = self.T
        rho = lambda a, b: tree.martin_metric(T, a, b)[0]
        self.assertEqual(rho(3, 3), 0.0)
        for a, b, c in ((1, 2, 3), (5, 20, 40), (0, 62, 31)):
            np.testing.assert_allclose(rho(a, b), rho(b, a))
            self.assertLessEqual(rho(a, c), rho(a, b) + rho(b, c) + 1e-15)
        _, tail = tree.martin_metric(T, 1, 2)
        self.assertEqual(tail, 2.0 * 2.0 ** -len(T))

    def test_separation(self):
        T = self.T
        x = T.children[1][0]
        self.assertGreaterEqual(tree.martin_metric(T, x, 2)[0],
                                tree.separation_bound(T, 1))


class TestTreeSystem(unittest.TestCase):
    def test_labels(self):
        src = TreeSource("o",
                         {"o": ("a", "b"), "a": ("aa", "ab"), "b": ("ba",)},
                         {"a": 0.25, "b": 0.75, "aa": 0.5, "ab": 0.5, "ba": 1.0})
        T = tree.build_tree(SystemSpec("tree", source=src), None, "o", 4)
        self.assertEqual(len(T), 6)
        self.assertTrue(T.is_regular)
        np.testing.assert_allclose(tree.green(T, 0, T.node("ab")), 0.125)
        np.testing.assert_allclose(tree.martin_kernel(T, T.node("b"), T.node("ba")), 4/3)


if __name__ == "__main__":
    enable_debug()
    unittest.main()
