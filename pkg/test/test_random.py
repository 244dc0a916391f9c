import os
import unittest
from unittest import mock

import numpy as np
from solharm.errors import ConfigError
from solharm.random import PCG64, map_blocks
from solharm.util import enable_debug, worker_count


class TestRandom(unittest.TestCase):
    def test_random(self):
        rng = PCG64()
        a = rng.random(shape=(3,))

        np.testing.assert_allclose(a.shape, (3,))
        self.assertTrue((0 <= a).all())
        self.assertTrue((a < 1.0).all())

    def test_random_seed(self):
        a = PCG64(seed=0).random(shape=(5,))
        b = PCG64(seed=0).random(shape=(5,))

        np.testing.assert_allclose(a, b)
        self.assertTrue((0 <= a).all())
        self.assertTrue((a < 1.0).all())

    def test_higher_dimension(self):
        a = PCG64(seed=1).random(shape=(5, 5, 5))

        np.testing.assert_allclose(a.shape, (5, 5, 5))
        self.assertTrue((0 <= a).all())
        self.assertTrue((a < 1.0).all())

    def test_single(self):
        a = PCG64(seed=2).random()
        self.assertTrue(0 <= float(a) < 1.0)

    def test_normal_even(self):
        a1 = PCG64(seed=0).normal(shape=(10,))
        a2 = PCG64(seed=0).normal(shape=(10,), mean=5, stddev=3)

        np.testing.assert_allclose((a2 - 5) / a1, np.full((10,), 3), rtol=1e-10)

    def test_normal_odd(self):
        a1 = PCG64(seed=0).normal(shape=(11,))
        a2 = PCG64(seed=0).normal(shape=(11,), mean=5, stddev=3)

        np.testing.assert_allclose((a2 - 5) / a1, np.full((11,), 3), rtol=1e-10)

    def test_randint(self):
        a = PCG64(seed=3).randint(shape=(5,))

        np.testing.assert_allclose(a.shape, (5,))
        self.assertTrue(np.all((0 <= a) & (a < (2 ** 32))))

    def test_randrange(self):
        a = PCG64(seed=4).randrange(shape=(5,), low=3, high=4)

        np.testing.assert_allclose(a, [3, 3, 3, 3, 3])

    def test_randrange_invalid(self):
        rng = PCG64(seed=4)
        with self.assertRaises(ValueError):
            rng.randrange(shape=(2,), low=-1, high=3)
        with self.assertRaises(ValueError):
            rng.randrange(shape=(2,), low=3, high=3)

    def test_dirichlet(self):
        a = PCG64(seed=5).dirichlet(3, shape=(100,))

        np.testing.assert_allclose(a.shape, (100, 3))
        np.testing.assert_allclose(a.sum(axis=-1), np.ones(100))
        self.assertTrue((a >= 0).all())

    def test_spawn(self):
        a, b = PCG64(seed=6).spawn(2)
        x = a.random(shape=(8,))
        y = b.random(shape=(8,))
        self.assertFalse(np.allclose(x, y))

        c, _ = PCG64(seed=6).spawn(2)
        np.testing.assert_allclose(c.random(shape=(8,)), x)


class TestMapBlocks(unittest.TestCase):
    def test_thread_independent(self):
        f = lambda n, rng: rng.random(shape=(n,))
        with mock.patch.dict(os.environ, {"SOLHARM_THREADS": "1"}):
            a = map_blocks(f, 1000, seed=7, block_size=64)
        with mock.patch.dict(os.environ, {"SOLHARM_THREADS": "4"}):
            b = map_blocks(f, 1000, seed=7, block_size=64)

        self.assertEqual(a.shape, (1000,))
        np.testing.assert_array_equal(a, b)

    def test_invalid(self):
        f = lambda n, rng: rng.random(shape=(n,))
        with self.assertRaises(ValueError):
            map_blocks(f, 0, seed=0)
        with self.assertRaises(ValueError):
            map_blocks(f, 10, seed=0, block_size=0)

    def test_worker_count(self):
        with mock.patch.dict(os.environ, {"SOLHARM_THREADS": "3"}):
            self.assertEqual(worker_count(), 3)
        for value in ("zero", "0", "-2"):
            with mock.patch.dict(os.environ, {"SOLHARM_THREADS": value}):
                with self.assertRaises(ConfigError) as cm:
                    worker_count()
            self.assertEqual(cm.exception.key, "SOLHARM_THREADS")


if __name__ == "__main__":
    enable_debug()
    unittest.main()
