"""
Random Module (:mod:`solharm.random`)
=====================================

Seeded Pseudo Random Number Generator (PRNG) with reproducible substreams


Examples
--------
>>> from solharm.random import PCG64
>>> r = PCG64(seed=0)

[0, 1) uniform random numbers can be generated by ``random(shape=None)``.

>>> print(r.random(shape=(3,)))
[0.63696169 0.26978671 0.04097352]

Independent streams for parallel workers are derived with ``spawn(n)``.

>>> a, b = r.spawn(2)

Large sample counts can be split into blocks which are computed
in parallel and concatenated in block order, so that the result only depends
on the seed and the sample count.

>>> from solharm.random import map_blocks
>>> x = map_blocks(lambda n, rng: rng.random(shape=(n,)), 10000, seed=7)
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np
import wblog

from .util import worker_count

__all__ = ["PRNG", "PCG64", "map_blocks"]

logger = wblog.getLogger()


class PRNG:
    """
    Abstract base class for PRNG

    Notes
    -----
    Subclass must implement ``random()``, ``randint()`` and ``spawn()``.
    Other distributions are derived from these.
    """
    _2p32 = int(2 ** 32)

    def random(self, *, shape: Optional[Iterable[int]] = None) -> np.ndarray:
        raise NotImplementedError

    def randint(self, *, shape: Optional[Iterable[int]] = None) -> np.ndarray:
        raise NotImplementedError

    def spawn(self, n: int) -> List[PRNG]:
        raise NotImplementedError

    def normal(self, *,
               shape: Optional[Iterable[int]] = None,
               mean: float = 0.0,
               stddev: float = 1.0) -> np.ndarray:
        """
        Generate Normal Distributing numbers

        Parameters
        ----------
        shape : iterable of ints, optional
            Output shape. If ``None`` (default), a single value is returned.
        mean : float, optional
            Mean. The default is ``0.0``.
        stddev : float, optional
            Standard deviation. The default is ``1.0``.

        Returns
        -------
        numpy.ndarray
            Normal random numbers

        Notes
        -----
        This method transforms [0, 1) uniform random numbers with
        Box-Muller method, so that every concrete PRNG gets the same
        transformation.
        """
        n = 1 if shape is None else int(np.prod(tuple(shape)))
        u = self.random(shape=(2 * ((n + 1) // 2),)).reshape(2, -1)
        r = np.sqrt(-2.0 * np.log1p(-u[0]))
        z = np.concatenate((r * np.cos(2 * np.pi * u[1]),
                            r * np.sin(2 * np.pi * u[1])))[:n]
        z = mean + stddev * z
        return z.reshape(tuple(shape)) if shape is not None else z[0]

    def randrange(self, *,
                  shape: Optional[Iterable[int]] = None,
                  low: int = 0,
                  high: int = int(2 ** 32)) -> np.ndarray:
        """
        Generate [low, high) random numbers

        Parameters
        ----------
        shape : iterable of ints, optional
            Output shape.
        low : int, optional
            Inclusive lowest value. The default is ``0``.
        high : int, optional
            Exclusive highest value. The default is ``2^32``.

        Returns
        -------
        numpy.ndarray
            Random integers

        Raises
        ------
        ValueError
            If not 0 <= low < high <= 2^32.
        """
        if low < 0:
            raise ValueError(f"`low` must be non negative integer, but {low}")
        if high > self._2p32:
            raise ValueError(f"`high` must not be greater than 2^32, but {high}")
        if low >= high:
            raise ValueError(f"`low` must be smaller than `high`, but {low}, {high}")

        if (low == 0) and (high == self._2p32):
            return self.randint(shape=shape)

        u = self.random(shape=shape)
        return np.minimum(low + np.floor(u * (high - low)), high - 1).astype(np.int64)

    def dirichlet(self, k: int, *, shape: Optional[Iterable[int]] = None) -> np.ndarray:
        """
        Generate uniform points of the (k-1)-simplex

        Parameters
        ----------
        k : int
            Number of components
        shape : iterable of ints, optional
            Batch shape. Output shape is ``(*shape, k)``.

        Returns
        -------
        numpy.ndarray
            Non negative vectors summing to 1 along the last axis.

        Notes
        -----
        Normalized standard exponential variables, i.e. Dirichlet(1, ..., 1).
        """
        batch = () if shape is None else tuple(shape)
        u = self.random(shape=(*batch, k))
        e = -np.log1p(-u)
        return e / e.sum(axis=-1, keepdims=True)


class PCG64(PRNG):
    """
    PCG64: Pseudo Random Number Generator

    Notes
    -----
    This class wraps numpy's PCG64 bit generator [1]_. Child streams are
    derived with ``numpy.random.SeedSequence.spawn``, which gives
    statistically independent streams for parallel workers.

    References
    ----------
    .. [1] M. E. O'Neill, "PCG: A Family of Simple Fast Space-Efficient
       Statistically Good Algorithms for Random Number Generation",
       https://www.pcg-random.org/
    """
    def __init__(self, seed: Optional[int] = None, *,
                 seed_sequence: Optional[np.random.SeedSequence] = None):
        """
        Initialize PCG64

        Parameters
        ----------
        seed : int, optional
            Random seed. If ``None`` (default), use OS entropy instead.
        seed_sequence : numpy.random.SeedSequence, optional
            Seed sequence. If specified, ``seed`` is ignored.
        """
        if seed_sequence is None:
            seed_sequence = np.random.SeedSequence(seed)
        self._seq = seed_sequence
        self._gen = np.random.Generator(np.random.PCG64(self._seq))

    def random(self, *, shape: Optional[Iterable[int]] = None) -> np.ndarray:
        """
        Generate [0, 1) floating numbers

        Parameters
        ----------
        shape : iterable of ints, optional
            Output shape. If ``None`` (default), a single value is returned.

        Returns
        -------
        numpy.ndarray
            Uniform random numbers
        """
        if shape is None:
            return self._gen.random()
        return self._gen.random(tuple(shape))

    def randint(self, *, shape: Optional[Iterable[int]] = None) -> np.ndarray:
        """
        Generate [0, 2^32) unsigned integer numbers

        Parameters
        ----------
        shape : iterable of ints, optional
            Output shape.

        Returns
        -------
        numpy.ndarray
            Random unsigned integers
        """
        size = None if shape is None else tuple(shape)
        return self._gen.integers(0, self._2p32, size=size, dtype=np.uint64)

    def spawn(self, n: int) -> List[PRNG]:
        """
        Spawn independent child streams

        Parameters
        ----------
        n : int
            Number of children

        Returns
        -------
        list of PCG64
            Child streams

        Notes
        -----
        Spawning advances the internal child counter, so that consecutive
        calls return different children.
        """
        return [PCG64(seed_sequence=s) for s in self._seq.spawn(n)]


def map_blocks(func: Callable[[int, PRNG], np.ndarray],
               n: int,
               *,
               seed: Optional[int] = None,
               block_size: int = 8192) -> np.ndarray:
    """
    Compute ``n`` samples block-wise on a thread pool

    Parameters
    ----------
    func : callable
        ``func(count, rng)`` returns an array whose first axis has ``count``
        entries.
    n : int
        Total number of samples
    seed : int, optional
        Random seed for the parent stream
    block_size : int, optional
        Samples per block. The default is ``8192``.

    Returns
    -------
    numpy.ndarray
        Concatenated samples in block order

    Raises
    ------
    ValueError
        If ``n`` or ``block_size`` is not positive.

    Notes
    -----
    Block ``i`` always uses the ``i``-th child of the seed sequence,
    so that results don't depend on ``SOLHARM_THREADS``.
    """
    if n < 1:
        raise ValueError(f"`n` must be positive, but {n}")
    if block_size < 1:
        raise ValueError(f"`block_size` must be positive, but {block_size}")

    counts: Sequence[int] = [min(block_size, n - i) for i in range(0, n, block_size)]
    streams = PCG64(seed).spawn(len(counts))

    workers = min(worker_count(), len(counts))
    logger.debug(f"map_blocks(n={n}, blocks={len(counts)}, workers={workers})")
    if workers == 1:
        parts = [func(c, s) for c, s in zip(counts, streams)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(func, counts, streams))

    return np.concatenate(parts, axis=0)
