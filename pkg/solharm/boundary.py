"""
Boundary Module (:mod:`solharm.boundary`)
=========================================

Path space ``Omega_{x0}`` of backward paths ``(x0, x1, ...)`` with
``r(x_{k+1}) = x_k``, its cylinder measure ``P_{x0}``, the ``W``-driven
random walk, and the boundary identification of paths with the Martin
boundary of ``T(x0)``.

Boundary points are represented by finite prefixes. Every boundary
quantity reports an explicit tail bound of the truncation.


Examples
--------
>>> from solharm import dynsys, filter, boundary
>>> sys = dynsys.SystemSpec("circle", N=2)
>>> haar = filter.bundled_filter("haar")
>>> path = boundary.PathPrefix(sys, (1/3, 1/6, 1/12))
>>> round(boundary.cylinder_measure(haar, path), 6)
0.699759
>>> z = boundary.sample_path(sys, haar, 1/3, 8, seed=0)
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import wblog

from .dynsys import (
    POINT_TOL, SystemSpec, apply_r, points_equal, preimage_grid
)
from .errors import SolharmError, TruncationError
from .filter import FilterSpec, eval_w
from .random import PRNG, map_blocks
from .soltyping import Point
from .tree import Tree

__all__ = [
    "PathPrefix",
    "cylinder_measure",
    "walk_batch",
    "sample_path",
    "sample_paths",
    "cylinder_frequencies",
    "boundary_kernel",
    "boundary_distance",
]

logger = wblog.getLogger()

ZERO_ROW = 1e-14


class PathPrefix:
    """
    Finite path ``(x0, x1, ..., xL)`` with ``r(x_{k+1}) = x_k``

    Notes
    -----
    Prefixes are immutable. They are used as elements of the path space,
    as solenoid point prefixes and as boundary point representatives.
    """
    def __init__(self, sys: SystemSpec, points: Iterable[Point], *, check: bool = True):
        """
        Initialize PathPrefix

        Parameters
        ----------
        sys : solharm.dynsys.SystemSpec
            System
        points : iterable
            ``x0, ..., xL``
        check : bool, optional
            Validate path compatibility. The default is ``True``.

        Raises
        ------
        ValueError
            If ``points`` is empty or ``r(x_{k+1}) != x_k``.
        """
        self.sys = sys
        if sys.is_circle:
            self.points: Tuple[Point, ...] = tuple(float(x) for x in points)
        else:
            self.points = tuple(points)
        if len(self.points) == 0:
            raise ValueError("PathPrefix requires at least x0")

        if check:
            for k in range(self.length):
                rx = apply_r(sys, self.points[k + 1])
                if not points_equal(sys, rx, self.points[k]):
                    raise ValueError(f"r(x_{k+1}) = {rx!r} doesn't match " +
                                     f"x_{k} = {self.points[k]!r}")

    @property
    def length(self) -> int:
        """
        Number of steps ``L``
        """
        return len(self.points) - 1

    @property
    def root(self) -> Point:
        return self.points[0]

    def truncate(self, n: int) -> PathPrefix:
        """
        Prefix ``(x0, ..., xn)``

        Raises
        ------
        solharm.errors.TruncationError
            If ``n > L``.
        """
        if n > self.length:
            raise TruncationError(f"prefix of length {self.length} can't be " +
                                  f"truncated to {n}")
        return PathPrefix(self.sys, self.points[:n + 1], check=False)

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other: object):
        if not isinstance(other, PathPrefix):
            return NotImplemented
        return (self.sys == other.sys) and (self.points == other.points)

    def __repr__(self) -> str:
        return f"<PathPrefix(x0={self.root!r}, L={self.length})>"


def cylinder_measure(filter: Optional[FilterSpec], prefix: PathPrefix) -> float:
    """
    Cylinder measure ``P_{x0}(V_{x0,...,xL}) = W(x1) ... W(xL)``

    Parameters
    ----------
    filter : solharm.filter.FilterSpec
        QMF filter. Ignored (may be ``None``) for tree systems.
    prefix : solharm.boundary.PathPrefix
        Cylinder

    Returns
    -------
    float
        Probability. ``1.0`` for ``L = 0``.
    """
    p = 1.0
    for x in prefix.points[1:]:
        p *= eval_w(filter, prefix.sys, x)
    return p


def _step_circle(sys: SystemSpec, filter: FilterSpec,
                 x: np.ndarray, u: np.ndarray) -> np.ndarray:
    ys = preimage_grid(sys, x)
    cdf = np.cumsum(filter.weight(ys), axis=-1)
    total = cdf[:, -1]
    bad = total < ZERO_ROW
    if np.any(bad):
        raise SolharmError("All children have zero weight below " +
                           f"x={x[bad][0]!r}")
    idx = np.count_nonzero(cdf < (u * total)[:, None], axis=-1)
    idx = np.minimum(idx, sys.N - 1)
    return ys[np.arange(x.shape[0]), idx]


def _step_tree(sys: SystemSpec, x: Point, u: float) -> Point:
    ys = sys.source.children(x)  # type: ignore
    if not ys:
        raise TruncationError(f"Walk reached leaf {x!r} of the tree source")
    cdf = np.cumsum([sys.source.weight(y) for y in ys])  # type: ignore
    if cdf[-1] < ZERO_ROW:
        raise SolharmError(f"All children have zero weight below {x!r}")
    idx = min(int(np.count_nonzero(cdf < u * cdf[-1])), len(ys) - 1)
    return ys[idx]


def walk_batch(sys: SystemSpec, filter: Optional[FilterSpec],
               x0: Union[np.ndarray, Sequence[Point]], length: int,
               rng: PRNG) -> Union[np.ndarray, List[Tuple[Point, ...]]]:
    """
    Batch of ``W``-walks

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        System
    filter : solharm.filter.FilterSpec
        QMF filter. Ignored for tree systems.
    x0 : numpy.ndarray or sequence
        Start points
    length : int
        Steps ``L``
    rng : solharm.random.PRNG
        Random stream. One uniform per step and path is consumed.

    Returns
    -------
    numpy.ndarray or list of tuples
        ``(n, L+1)`` array of angles for circle systems,
        path tuples for tree systems.

    Notes
    -----
    Each step selects a preimage by inverse CDF over
    the canonical preimage order.
    """
    n = len(x0)
    u = rng.random(shape=(n, length))

    if not sys.is_circle:
        paths = []
        for i, x in enumerate(x0):
            p = [x]
            for k in range(length):
                p.append(_step_tree(sys, p[-1], u[i, k]))
            paths.append(tuple(p))
        return paths

    filter.require_qmf(sys)  # type: ignore
    out = np.empty((n, length + 1))
    out[:, 0] = np.asarray(x0, dtype=float)
    for k in range(length):
        out[:, k + 1] = _step_circle(sys, filter, out[:, k], u[:, k])  # type: ignore
    return out


def sample_paths(sys: SystemSpec, filter: Optional[FilterSpec], x0: Point,
                 length: int, n: int, seed: Optional[int]
                 ) -> Union[np.ndarray, List[Tuple[Point, ...]]]:
    """
    Sample ``n`` independent walks from ``x0``

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        System
    filter : solharm.filter.FilterSpec
        QMF filter
    x0 : float or label
        Start point
    length : int
        Steps ``L``
    n : int
        Number of walks
    seed : int
        Random seed

    Returns
    -------
    numpy.ndarray or list of tuples
        Walks. Results only depend on ``seed`` and ``n``.
    """
    if length < 0:
        raise ValueError(f"`length` must be non negative, but {length}")

    if not sys.is_circle:
        def block(c: int, rng: PRNG) -> np.ndarray:
            a = np.empty((c, length + 1), dtype=object)
            for i, p in enumerate(walk_batch(sys, filter, [x0] * c, length, rng)):
                for k, x in enumerate(p):
                    a[i, k] = x
            return a
        return [tuple(row) for row in map_blocks(block, n, seed=seed)]

    return map_blocks(lambda c, rng: walk_batch(sys, filter, np.full(c, float(x0)),
                                                length, rng),
                      n, seed=seed)


def sample_path(sys: SystemSpec, filter: Optional[FilterSpec], x0: Point,
                length: int, seed: Optional[int]) -> PathPrefix:
    """
    Sample a single walk

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        System
    filter : solharm.filter.FilterSpec
        QMF filter
    x0 : float or label
        Start point
    length : int
        Steps ``L``
    seed : int
        Random seed

    Returns
    -------
    solharm.boundary.PathPrefix
        Walk, identical on repeated calls with the same seed

    Raises
    ------
    solharm.errors.SolharmError
        If every child of a visited node has zero weight.
    """
    p = sample_paths(sys, filter, x0, length, 1, seed)[0]
    return PathPrefix(sys, tuple(p), check=False)


def cylinder_frequencies(tree: Tree, paths: np.ndarray, depth: int) -> np.ndarray:
    """
    Empirical frequencies of depth ``depth`` cylinders

    Parameters
    ----------
    tree : solharm.tree.Tree
        Circle system tree rooted at the walks' start
    paths : numpy.ndarray
        ``(n, L+1)`` walks with ``L >= depth``
    depth : int
        Cylinder depth, at most the tree depth

    Returns
    -------
    numpy.ndarray
        Visit counts per node index divided by ``n``.
        Only nodes at level ``depth`` are non zero.
    """
    tree.sys.require_circle("cylinder_frequencies")
    paths = np.asarray(paths, dtype=float)
    if depth > min(tree.depth, paths.shape[1] - 1):
        raise TruncationError(f"depth {depth} exceeds tree depth {tree.depth} " +
                              f"or path length {paths.shape[1] - 1}")

    pts = np.asarray(tree.points, dtype=float)
    cur = np.zeros(paths.shape[0], dtype=np.int64)
    for k in range(depth):
        cand = np.asarray([tree.children[c] for c in cur], dtype=np.int64)
        d = np.abs(pts[cand] - paths[:, k + 1, None]) % 1.0
        d = np.minimum(d, 1.0 - d)
        j = np.argmin(d, axis=-1)
        if np.any(d[np.arange(cur.shape[0]), j] > POINT_TOL):
            raise ValueError(f"Walk leaves the tree at step {k + 1}")
        cur = cand[np.arange(cur.shape[0]), j]

    return np.bincount(cur, minlength=len(tree)) / paths.shape[0]


def _path_ids(tree: Tree, prefix: PathPrefix, n: int) -> List[int]:
    if prefix.length < n:
        raise TruncationError(f"undetermined at this truncation: prefix length " +
                              f"{prefix.length} < depth {n}")
    return tree.locate(prefix.points[:n + 1])


def boundary_kernel(tree: Tree, x: int, prefix: PathPrefix) -> float:
    """
    Extended Martin kernel ``K(x, Phi(path))``

    Parameters
    ----------
    tree : solharm.tree.Tree
        Regular tree rooted at ``prefix.root``
    x : int
        Node index
    prefix : solharm.boundary.PathPrefix
        Boundary point representative of length at least ``n(x)``

    Returns
    -------
    float
        ``1 / (W(x1) ... W(xn))`` if ``x_n = x`` for ``n = n(x)``, else ``0``.

    Raises
    ------
    solharm.errors.TruncationError
        If the prefix is shorter than ``n(x)``.
    solharm.errors.RegularityError
        If the tree is not regular.
    """
    tree.require_regular()
    n = int(tree.level[x])
    ids = _path_ids(tree, prefix, n)
    return float(tree.C[x]) if ids[n] == x else 0.0


def _boundary_column(tree: Tree, prefix: PathPrefix) -> np.ndarray:
    ids = _path_ids(tree, prefix, tree.depth)
    col = np.zeros(len(tree))
    col[ids] = tree.C[ids]
    return col


def boundary_distance(tree: Tree, A: PathPrefix, B: PathPrefix) -> Tuple[float, float]:
    """
    Martin metric between boundary points

    Parameters
    ----------
    tree : solharm.tree.Tree
        Regular tree rooted at the prefixes' root
    A, B : solharm.boundary.PathPrefix
        Boundary point representatives of length at least the tree depth

    Returns
    -------
    value : float
        ``sum_q D(q) |K(q, Phi(A)) - K(q, Phi(B))| / (C_q + 1)``
        over the truncation
    tail : float
        Bound of the omitted terms

    Raises
    ------
    solharm.errors.TruncationError
        If a prefix is shorter than the tree depth.
    """
    tree.require_regular()
    tail = 2.0 * np.ldexp(1.0, -len(tree))
    dK = np.abs(_boundary_column(tree, A) - _boundary_column(tree, B))
    return float(np.sum(tree.D * dK / (tree.C + 1.0))), tail
