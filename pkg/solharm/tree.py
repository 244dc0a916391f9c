"""
Tree Module (:mod:`solharm.tree`)
=================================

Depth truncated preimage trees ``T(x0)`` with the backward random walk
``p(x, y) = W(y)`` for ``r(y) = x``, its Green function, Martin kernel and
Martin metric.

Nodes are addressed by their BFS index ``i`` (root is ``0``).
Children of a node are enumerated in canonical preimage order.


Examples
--------
>>> from solharm import dynsys, filter, tree
>>> sys = dynsys.SystemSpec("circle", N=2)
>>> T = tree.build_tree(sys, filter.bundled_filter("haar"), 0.1234477851, 4)
>>> len(T)
31
>>> T.report.regular
True
>>> tree.martin_kernel(T, 0, 30)
1.0
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import wblog

from .dynsys import SystemSpec, apply_r, points_close, points_equal, preimages
from .errors import RegularityError, TruncationError
from .filter import FilterSpec, eval_w
from .soltyping import Point

__all__ = [
    "ZERO_WEIGHT",
    "RegularityReport",
    "Tree",
    "build_tree",
    "check_regular",
    "check_orbit",
    "transition_pn",
    "transition_matrix",
    "green",
    "green_matrix",
    "martin_kernel",
    "martin_matrix",
    "martin_metric",
    "separation_bound",
]

logger = wblog.getLogger()

ZERO_WEIGHT = 1e-14


@dataclass(frozen=True)
class RegularityReport:
    """
    Regularity of a root up to a depth

    Attributes
    ----------
    regular : bool
        Whether no periodic orbit and no zero weight was found
    depth : int
        Depth of validity
    witness : str, optional
        Failure witness
    """
    regular: bool
    depth: int
    witness: Optional[str] = None


class Tree:
    """
    Truncated preimage tree

    Attributes
    ----------
    points : list
        Node points in BFS order
    parent : numpy.ndarray
        Parent index (``-1`` for the root)
    level : numpy.ndarray
        Depth ``n(x)`` of each node
    W : numpy.ndarray
        Weight ``W(x)``. The root entry is the weight of the root point,
        which doesn't enter ``Wn``.
    Wn : numpy.ndarray
        ``W^(n(x))(x) = W(x) W(r(x)) ... W(r^{n(x)-1}(x))``
    D : numpy.ndarray
        Metric weights ``D(q_i) = 2^{-(i+1)}``
    children : tuple of tuples
        Child indices
    report : solharm.tree.RegularityReport
        Regularity of the root up to ``depth``

    Notes
    -----
    Trees are immutable after construction. Use ``build_tree()``.
    """
    def __init__(self,
                 sys: SystemSpec,
                 filter: Optional[FilterSpec],
                 depth: int,
                 points: List[Point],
                 parent: np.ndarray,
                 W: np.ndarray,
                 report: RegularityReport):
        self.sys = sys
        self.filter = filter
        self.depth = depth
        self.points = points
        self.parent = parent
        self.W = W
        self.report = report

        n = parent.shape[0]
        self.level = np.zeros(n, dtype=np.int64)
        self.Wn = np.ones(n)
        ch: List[List[int]] = [[] for _ in range(n)]
        for i in range(1, n):
            p = parent[i]
            self.level[i] = self.level[p] + 1
            self.Wn[i] = W[i] * self.Wn[p]
            ch[p].append(i)
        self.children: Tuple[Tuple[int, ...], ...] = tuple(tuple(c) for c in ch)
        self.D = np.ldexp(1.0, -(np.arange(n) + 1))

        # anc[k, y]: k-th ancestor, prod[k, y]: W(y) ... W(r^{k-1}(y))
        self.anc = np.full((depth + 1, n), -1, dtype=np.int64)
        self.prod = np.zeros((depth + 1, n))
        self.anc[0] = np.arange(n)
        self.prod[0] = 1.0
        for k in range(1, depth + 1):
            prev = self.anc[k - 1]
            ok = prev > 0
            self.anc[k, ok] = parent[prev[ok]]
            self.prod[k, ok] = self.prod[k - 1, ok] * W[prev[ok]]

        for a in (self.level, self.Wn, self.D, self.anc, self.prod):
            a.setflags(write=False)

    def __len__(self) -> int:
        return self.parent.shape[0]

    @property
    def root(self) -> Point:
        return self.points[0]

    @property
    def C(self) -> np.ndarray:
        """
        Kernel bounds ``C_x = 1 / W^(n(x))(x)``
        """
        with np.errstate(divide="ignore"):
            return 1.0 / self.Wn

    @property
    def is_regular(self) -> bool:
        return self.report.regular

    def require_regular(self):
        """
        Raises
        ------
        solharm.errors.RegularityError
            If the root is not regular.
        """
        if not self.report.regular:
            raise RegularityError(f"tree rooted at {self.root!r} is not regular",
                                  self.report.witness)

    def in_subtree(self, x: int, y: int) -> bool:
        """
        Whether ``y`` belongs to ``T(x)`` (including ``y = x``)
        """
        n = self.level[y] - self.level[x]
        return bool((n >= 0) and (self.anc[n, y] == x))

    def internal(self) -> np.ndarray:
        """
        Indices of internal nodes
        """
        return np.asarray([i for i, c in enumerate(self.children) if c], dtype=np.int64)

    def node(self, point: Point) -> int:
        """
        Index of the first node at ``point``

        Raises
        ------
        ValueError
            If no node matches.
        """
        for i, p in enumerate(self.points):
            if points_equal(self.sys, p, point):
                return i
        raise ValueError(f"Point {point!r} is not in the tree")

    def locate(self, points: Sequence[Point]) -> List[int]:
        """
        Node indices along a path ``(x0, x1, ...)``

        Parameters
        ----------
        points : sequence
            Path starting at the root. Entries beyond ``depth`` are ignored.

        Returns
        -------
        list of ints
            Node index of each path entry

        Raises
        ------
        ValueError
            If the path leaves the tree.
        """
        if not points_equal(self.sys, points[0], self.root):
            raise ValueError(f"Path starts at {points[0]!r}, but root is {self.root!r}")

        ids = [0]
        for x in points[1:self.depth + 1]:
            for c in self.children[ids[-1]]:
                if points_equal(self.sys, self.points[c], x):
                    ids.append(c)
                    break
            else:
                raise ValueError(f"Point {x!r} is not a child of node {ids[-1]}")
        return ids

    def to_rows(self) -> List[Tuple]:
        """
        Node table rows ``(id, parent, depth, point, W, Wn, D)``
        """
        return [(i, int(self.parent[i]), int(self.level[i]), self.points[i],
                 float(self.W[i]), float(self.Wn[i]), float(self.D[i]))
                for i in range(len(self))]

    def __repr__(self) -> str:
        return f"<Tree(root={self.root!r}, depth={self.depth}, nodes={len(self)})>"


def _regularity(sys: SystemSpec, x0: Point, depth: int,
                points: List[Point], W: np.ndarray, is_root: np.ndarray) -> RegularityReport:
    if sys.is_circle:
        y = x0
        for n in range(1, depth + 1):
            y = apply_r(sys, y)
            # a float root stands for the rational it approximates
            if points_close(y, x0):
                return RegularityReport(False, depth,
                                        f"r^{n}(x0) = x0 at x0={x0!r} (period {n})")

    zero = np.flatnonzero((W <= ZERO_WEIGHT) & ~(is_root & (not sys.is_circle)))
    if zero.shape[0] > 0:
        i = int(zero[0])
        return RegularityReport(False, depth, f"W = {W[i]} at node {i} ({points[i]!r})")
    return RegularityReport(True, depth)


def build_tree(sys: SystemSpec, filter: Optional[FilterSpec], x0: Point, depth: int) -> Tree:
    """
    Build the truncated preimage tree ``T(x0)``

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        System
    filter : solharm.filter.FilterSpec
        QMF filter. Ignored (may be ``None``) for tree systems.
    x0 : float or label
        Root
    depth : int
        Truncation depth ``d``

    Returns
    -------
    solharm.tree.Tree
        Tree with BFS enumerated nodes

    Raises
    ------
    ValueError
        If ``depth < 0``.

    Notes
    -----
    Non regular roots give a tree with a failing ``report``,
    kernel operations on it raise ``RegularityError``.
    """
    if depth < 0:
        raise ValueError(f"`depth` must be non negative, but {depth}")

    points: List[Point] = [x0]
    parent: List[int] = [-1]
    W: List[float] = [eval_w(filter, sys, x0)]  # type: ignore

    start, stop = 0, 1
    for _ in range(depth):
        for i in range(start, stop):
            ys = preimages(sys, points[i])
            if not ys:
                continue
            points.extend(ys)
            parent.extend([i] * len(ys))
            w = eval_w(filter, sys, np.asarray(ys)) if sys.is_circle else \
                [eval_w(filter, sys, y) for y in ys]
            W.extend(np.asarray(w, dtype=float).tolist())
        start, stop = stop, len(points)

    Wa = np.asarray(W, dtype=float)
    is_root = np.zeros(Wa.shape[0], dtype=bool)
    is_root[0] = True
    report = _regularity(sys, x0, depth, points, Wa, is_root)

    T = Tree(sys, filter, depth, points, np.asarray(parent, dtype=np.int64), Wa, report)
    logger.debug(f"build_tree: {T}")
    if not report.regular:
        logger.warning(f"Tree root {x0!r} is not regular: {report.witness}")
    return T


def check_regular(sys: SystemSpec, filter: Optional[FilterSpec], x0: Point,
                  depth: int) -> RegularityReport:
    """
    Check regularity of ``x0`` up to depth ``d``

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        System
    filter : solharm.filter.FilterSpec
        QMF filter
    x0 : float or label
        Root
    depth : int
        Depth ``d >= 1``

    Returns
    -------
    solharm.tree.RegularityReport
        ``regular`` is ``False`` if ``r^n(x0) = x0`` for some ``1 <= n <= d``
        or ``W <= 1e-14`` at a node.
    """
    if depth < 1:
        raise ValueError(f"`depth` must be positive, but {depth}")
    return build_tree(sys, filter, x0, depth).report


def check_orbit(sys: SystemSpec, filter: FilterSpec, x0: float,
                depth: int) -> RegularityReport:
    """
    Check the forward orbit ``r(x0), ..., r^d(x0)`` of a circle root

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    filter : solharm.filter.FilterSpec
        QMF filter
    x0 : float
        Root
    depth : int
        Number of forward steps ``d``

    Returns
    -------
    solharm.tree.RegularityReport
        ``regular`` is ``False`` if ``W(r^n(x0)) <= 1e-14`` or
        ``r^n(x0)`` returns to an earlier orbit point for some ``n <= d``.
    """
    sys.require_circle("check_orbit")
    orbit = [float(x0)]
    for n in range(1, depth + 1):
        y = float(apply_r(sys, orbit[-1]))
        w = float(eval_w(filter, sys, y))
        if w <= ZERO_WEIGHT:
            return RegularityReport(False, depth,
                                    f"W = {w} at r^{n}(x0) = {y!r}")
        for k, p in enumerate(orbit):
            if points_close(y, p):
                return RegularityReport(False, depth,
                                        f"r^{n}(x0) = r^{k}(x0) = {y!r} (period {n - k})")
        orbit.append(y)
    return RegularityReport(True, depth)


def transition_pn(tree: Tree, x: int, y: int, n: int) -> float:
    """
    ``n``-step transition probability ``p_n(x, y)``

    Returns
    -------
    float
        ``W(y) W(r(y)) ... W(r^{n-1}(y))`` if ``y`` is a depth ``n``
        descendant of ``x``, else ``0``.

    Raises
    ------
    solharm.errors.TruncationError
        If ``n`` exceeds the tree depth.
    """
    if n < 0:
        raise ValueError(f"`n` must be non negative, but {n}")
    if n > tree.depth:
        raise TruncationError(f"n={n} exceeds tree depth {tree.depth}")
    if (tree.level[y] - tree.level[x] == n) and (tree.anc[n, y] == x):
        return float(tree.prod[n, y])
    return 0.0


def transition_matrix(tree: Tree) -> np.ndarray:
    """
    Node indexed one step transition matrix ``P``
    """
    n = len(tree)
    P = np.zeros((n, n))
    y = np.arange(1, n)
    P[tree.parent[1:], y] = tree.W[1:]
    return P


def green(tree: Tree, x: int, y: int) -> float:
    """
    Green function ``g(x, y) = sum_n p_n(x, y)``

    Raises
    ------
    solharm.errors.RegularityError
        If the tree is not regular.
    """
    tree.require_regular()
    n = tree.level[y] - tree.level[x]
    if n < 0:
        return 0.0
    return transition_pn(tree, x, y, int(n))


def _kernel_matrix(tree: Tree, values: np.ndarray) -> np.ndarray:
    n = len(tree)
    M = np.zeros((n, n))
    for k in range(tree.depth + 1):
        ys = np.flatnonzero(tree.anc[k] >= 0)
        xs = tree.anc[k, ys]
        M[xs, ys] = values[k, ys] if values.ndim == 2 else values[xs]
    return M


def green_matrix(tree: Tree) -> np.ndarray:
    """
    All pairs Green function ``G[x, y]``
    """
    tree.require_regular()
    return _kernel_matrix(tree, tree.prod)


def martin_kernel(tree: Tree, x: int, y: int) -> float:
    """
    Martin kernel ``K(x, y) = g(x, y) / g(x0, y)``

    Returns
    -------
    float
        ``C_x = 1 / W^(n(x))(x)`` if ``y`` is in ``T(x)``, else ``0``.

    Raises
    ------
    solharm.errors.RegularityError
        If the tree is not regular.
    """
    tree.require_regular()
    return float(tree.C[x]) if tree.in_subtree(x, y) else 0.0


def martin_matrix(tree: Tree) -> np.ndarray:
    """
    All pairs Martin kernel ``K[x, y]``
    """
    tree.require_regular()
    return _kernel_matrix(tree, tree.C)


def _kernel_column(tree: Tree, y: int) -> np.ndarray:
    col = np.zeros(len(tree))
    a = tree.anc[:tree.level[y] + 1, y]
    col[a] = tree.C[a]
    return col


def martin_metric(tree: Tree, x: int, y: int) -> Tuple[float, float]:
    """
    Martin metric ``rho(x, y)``

    Returns
    -------
    value : float
        ``sum_q D(q) (|K(q,x) - K(q,y)| + |delta_qx - delta_qy|) / (C_q + 1)``
        over the truncation
    tail : float
        Bound of the omitted terms, ``2 sum_{i >= #nodes} 2^{-(i+1)}``

    Raises
    ------
    solharm.errors.RegularityError
        If the tree is not regular.
    """
    tree.require_regular()
    tail = 2.0 * np.ldexp(1.0, -len(tree))
    if x == y:
        return 0.0, tail

    dK = np.abs(_kernel_column(tree, x) - _kernel_column(tree, y))
    dK[x] += 1.0
    dK[y] += 1.0
    return float(np.sum(tree.D * dK / (tree.C + 1.0))), tail


def separation_bound(tree: Tree, q: int) -> float:
    """
    Lower bound ``D(q) C_q / (C_q + 1)`` of ``rho`` between points
    separated at node ``q``
    """
    C = tree.C[q]
    return float(tree.D[q] * C / (C + 1.0))
