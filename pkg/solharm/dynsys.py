"""
Dynamical System Module (:mod:`solharm.dynsys`)
===============================================

A finite-to-one onto map ``r`` on a space ``X`` with a strongly invariant
probability measure ``mu``. Two realizations are provided;

* circle power map ``r(t) = N t mod 1`` with Haar (Lebesgue) measure,
  points are angles in [0, 1)
* abstract weighted preimage tree (``TreeSource``), where only the tree,
  boundary and harmonic modules apply


Examples
--------
>>> import numpy as np
>>> from solharm import dynsys
>>> sys = dynsys.SystemSpec("circle", N=2)
>>> dynsys.apply_r(sys, 2/3)
0.33333333333333326
>>> dynsys.preimages(sys, 1/3)
(0.16666666666666666, 0.6666666666666666)
>>> q = dynsys.integrate_mu(sys, lambda t: np.cos(np.pi * t) ** 2)
>>> round(q.value.real, 12)
0.5
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import (
    Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
)
from typing_extensions import Literal

import numpy as np
import wblog

from .errors import SolharmError, TruncationError
from .random import PCG64, PRNG
from .soltyping import ArrayLike, CircleFunction, Interval, Label, Point

__all__ = [
    "POINT_TOL",
    "EXACT_ULP",
    "SystemSpec",
    "TreeSource",
    "ArcSet",
    "Expansion",
    "Quadrature",
    "reduce_angle",
    "apply_r",
    "preimages",
    "preimage_grid",
    "points_equal",
    "points_close",
    "integrate_mu",
    "average_preimages",
    "strong_invariance_residual",
    "sample_mu",
    "sample_expansion",
]

logger = wblog.getLogger()

POINT_TOL = 1e-12
# Half unit in the last place of angles in [1, 2)
EXACT_ULP = 2.0 ** -53

# Geometric grading of panels next to quadrature breakpoints
GRADING_RATIO = 0.2
GRADING_LEVELS = 16


class TreeSource:
    """
    Abstract weighted preimage tree

    Notes
    -----
    Nodes are opaque hashable labels. ``r`` maps a node to its parent,
    and the weight ``W`` of a node is the transition probability from its
    parent. Labels without children are leaves of the truncation.
    """
    def __init__(self,
                 root: Label,
                 children: Mapping[Label, Sequence[Label]],
                 weights: Mapping[Label, float],
                 *, tol: float = 1e-10):
        """
        Initialize TreeSource

        Parameters
        ----------
        root : hashable
            Root label
        children : mapping
            Ordered child labels of each internal node
        weights : mapping
            Weight of each non-root node
        tol : float, optional
            Tolerance of the partition of unity. Default is ``1e-10``.

        Raises
        ------
        ValueError
            If a label has two parents, the root has a parent, a weight is
            missing or negative, or children weights don't sum to 1.
        """
        self.root = root
        self._children: Dict[Label, Tuple[Label, ...]] = {
            k: tuple(v) for k, v in children.items()
        }
        self._parent: Dict[Label, Label] = {}
        self._weights: Dict[Label, float] = {}

        for p, cs in self._children.items():
            if len(cs) == 0:
                continue
            s = 0.0
            for c in cs:
                if c == root:
                    raise ValueError(f"Root {root!r} must not have a parent")
                if c in self._parent:
                    raise ValueError(f"Label {c!r} has two parents: " +
                                     f"{self._parent[c]!r}, {p!r}")
                if c not in weights:
                    raise ValueError(f"Weight of {c!r} is missing")
                w = float(weights[c])
                if w < 0:
                    raise ValueError(f"Weight of {c!r} must be non negative, but {w}")
                self._parent[c] = p
                self._weights[c] = w
                s += w
            if abs(s - 1.0) > tol:
                raise ValueError(f"Children weights of {p!r} sum to {s}, not 1")

        logger.debug(f"TreeSource(root={root!r}, nodes={len(self._parent) + 1})")

    def children(self, label: Label) -> Tuple[Label, ...]:
        """
        Ordered children of a node

        Parameters
        ----------
        label : hashable
            Node label

        Returns
        -------
        tuple
            Child labels (empty for leaves)
        """
        return self._children.get(label, tuple())

    def parent(self, label: Label) -> Label:
        """
        Parent of a node

        Parameters
        ----------
        label : hashable
            Node label

        Returns
        -------
        hashable
            Parent label

        Raises
        ------
        solharm.errors.TruncationError
            If ``label`` is the root.
        ValueError
            If ``label`` is unknown.
        """
        if label == self.root:
            raise TruncationError(f"root {label!r} has no image within truncation")
        try:
            return self._parent[label]
        except KeyError:
            raise ValueError(f"Unknown label {label!r}")

    def weight(self, label: Label) -> float:
        """
        Weight of a node (``1.0`` for the root)
        """
        if label == self.root:
            return 1.0
        try:
            return self._weights[label]
        except KeyError:
            raise ValueError(f"Unknown label {label!r}")

    def __contains__(self, label: object) -> bool:
        return (label == self.root) or (label in self._parent)

    @classmethod
    def from_config(cls, cfg: Mapping) -> TreeSource:
        """
        Create from ``{"root": r, "children": {...}, "weights": {...}}``
        """
        return cls(cfg["root"], cfg["children"], cfg["weights"])


class SystemSpec:
    """
    Dynamical system ``(X, r, mu)``

    See Also
    --------
    solharm.dynsys.TreeSource : Abstract weighted preimage tree
    """
    def __init__(self,
                 kind: Literal["circle", "tree"] = "circle",
                 N: int = 2,
                 *,
                 panels: int = 4096,
                 nodes: int = 8,
                 source: Optional[TreeSource] = None):
        """
        Initialize SystemSpec

        Parameters
        ----------
        kind : {"circle", "tree"}, optional
            System kind. The default is ``"circle"``.
        N : int, optional
            Branching of the circle map ``r(t) = N t mod 1``.
            The default is ``2``.
        panels : int, optional
            Number of quadrature panels for ``mu``-integrals.
            The default is ``4096``.
        nodes : int, optional
            Gauss-Legendre nodes per panel. The default is ``8``.
        source : solharm.dynsys.TreeSource, optional
            Preimage tree. Required for ``kind="tree"``.

        Raises
        ------
        ValueError
            If ``kind`` is unknown, ``N < 1``, ``panels < 2``, ``nodes < 1``,
            or ``source`` is missing for a tree system.

        Notes
        -----
        ``N = 1`` is accepted but degenerate. QMF then forces
        ``|m0| = 1`` and the walk is deterministic.
        """
        if kind not in ("circle", "tree"):
            raise ValueError(f"`kind` must be 'circle' or 'tree', but {kind!r}")
        if int(N) < 1:
            raise ValueError(f"`N` must be positive integer, but {N}")
        if panels < 2:
            raise ValueError(f"`panels` must be at least 2, but {panels}")
        if nodes < 1:
            raise ValueError(f"`nodes` must be positive, but {nodes}")
        if kind == "tree" and source is None:
            raise ValueError("Tree system requires `source`")

        self.kind = kind
        self.N = int(N)
        self.panels = int(panels)
        self.nodes = int(nodes)
        self.source = source

        logger.debug(f"SystemSpec(kind={kind}, N={self.N}, " +
                     f"panels={self.panels}, nodes={self.nodes})")
        if self.is_circle and self.degenerate:
            logger.warning("degenerate: W = |m0|^2, deterministic walk")

    @property
    def is_circle(self) -> bool:
        return self.kind == "circle"

    @property
    def degenerate(self) -> bool:
        """
        Whether ``r`` is bijective (``N = 1``)
        """
        return self.N == 1

    @property
    def exact(self) -> bool:
        """
        Whether preimage arithmetic is exact in binary (``N`` is power of 2)
        """
        return (self.N & (self.N - 1)) == 0

    def require_circle(self, what: str):
        if not self.is_circle:
            raise SolharmError(f"{what} requires a circle system, but kind={self.kind}")

    def __eq__(self, other: object):
        if not isinstance(other, SystemSpec):
            return NotImplemented
        return ((self.kind, self.N, self.panels, self.nodes, self.source) ==
                (other.kind, other.N, other.panels, other.nodes, other.source))

    def __repr__(self) -> str:
        return f"<SystemSpec(kind={self.kind}, N={self.N}, panels={self.panels})>"

    @classmethod
    def from_config(cls, cfg: Mapping) -> SystemSpec:
        """
        Create from ``{"kind": "circle", "N": 2, "panels": 4096}``

        Parameters
        ----------
        cfg : mapping
            System section of the run configuration

        Returns
        -------
        solharm.dynsys.SystemSpec
            System
        """
        kind = cfg.get("kind", "circle")
        source = TreeSource.from_config(cfg["tree"]) if kind == "tree" else None
        return cls(kind, cfg.get("N", 2),
                   panels=cfg.get("panels", 4096),
                   nodes=cfg.get("nodes", 8),
                   source=source)


class ArcSet:
    """
    Finite union of arcs of the circle [0, 1)

    Arcs are half open ``[a, b)``. Wrapping arcs ``(a, b)`` with ``a > b``
    mean ``[a, 1) + [0, b)``.

    Examples
    --------
    >>> A = ArcSet.parse("0,0.45;0.55,1")
    >>> A.measure()
    0.9
    >>> A.complement()
    ArcSet('0.45,0.55')
    """
    def __init__(self, arcs: Iterable[Interval]):
        """
        Initialize ArcSet

        Parameters
        ----------
        arcs : iterable of (float, float)
            Arc end points in [0, 1]

        Raises
        ------
        ValueError
            If an end point is outside [0, 1].
        """
        flat: List[Interval] = []
        for a, b in arcs:
            a, b = float(a), float(b)
            if not ((0.0 <= a <= 1.0) and (0.0 <= b <= 1.0)):
                raise ValueError(f"Arc ({a}, {b}) must be inside [0, 1]")
            if a <= b:
                if a < b:
                    flat.append((a, b))
            else:
                flat.extend(((a, 1.0), (0.0, b)))

        merged: List[Interval] = []
        for a, b in sorted(flat):
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        self.arcs: Tuple[Interval, ...] = tuple(merged)

    @classmethod
    def parse(cls, text: str) -> ArcSet:
        """
        Parse ``"a,b;c,d"``

        Raises
        ------
        ValueError
            If ``text`` is malformed.
        """
        arcs = []
        for part in text.split(";"):
            part = part.strip()
            if not part:
                continue
            ends = part.split(",")
            if len(ends) != 2:
                raise ValueError(f"Arc must be 'a,b', but {part!r}")
            arcs.append((float(ends[0]), float(ends[1])))
        return cls(arcs)

    @classmethod
    def whole(cls) -> ArcSet:
        return cls([(0.0, 1.0)])

    def contains(self, t: ArrayLike) -> np.ndarray:
        """
        Membership of angles

        Parameters
        ----------
        t : float or numpy.ndarray
            Angles in [0, 1)

        Returns
        -------
        numpy.ndarray of bool
            Membership
        """
        t = np.asarray(t, dtype=float)
        m = np.zeros(t.shape, dtype=bool)
        for a, b in self.arcs:
            m |= (a <= t) & ((t < b) | (b >= 1.0))
        return m

    def measure(self) -> float:
        """
        Haar measure
        """
        return float(sum(b - a for a, b in self.arcs))

    def complement(self) -> ArcSet:
        comp = []
        last = 0.0
        for a, b in self.arcs:
            if a > last:
                comp.append((last, a))
            last = b
        if last < 1.0:
            comp.append((last, 1.0))
        return ArcSet(comp)

    @property
    def edges(self) -> Tuple[float, ...]:
        """
        Arc end points, used as quadrature breakpoints
        """
        return tuple(sorted({e % 1.0 for arc in self.arcs for e in arc}))

    def __eq__(self, other: object):
        if not isinstance(other, ArcSet):
            return NotImplemented
        return self.arcs == other.arcs

    def __str__(self) -> str:
        return ";".join(f"{a:g},{b:g}" for a, b in self.arcs)

    def __repr__(self) -> str:
        return f"ArcSet('{self}')"


class Expansion:
    """
    Circle point given by base-N digits, ``t = sum_k d_k N^{-k-1}``

    ``r`` shifts the digits, so forward orbits are exact as long as digits
    remain. Floating point ``N t mod 1`` instead loses one digit per step
    and collapses every double to 0 after about 53 doublings.
    """
    def __init__(self, N: int, digits: Iterable[int]):
        """
        Initialize Expansion

        Parameters
        ----------
        N : int
            Base, at least 2
        digits : iterable of ints
            Digits in [0, N)

        Raises
        ------
        ValueError
            If ``N < 2`` or a digit is out of range.
        """
        if N < 2:
            raise ValueError(f"`N` must be at least 2, but {N}")
        self.N = int(N)
        self.digits = np.asarray(digits, dtype=np.int64)
        if self.digits.ndim != 1:
            raise ValueError("`digits` must be 1-dimensional")
        if np.any((self.digits < 0) | (self.digits >= self.N)):
            raise ValueError(f"Digits must be in [0, {self.N})")
        self.precision = int(np.ceil(53 / np.log2(self.N))) + 2

    @classmethod
    def from_float(cls, t: float, N: int, length: int) -> Expansion:
        """
        Exact digits of a double

        Parameters
        ----------
        t : float
            Angle in [0, 1)
        N : int
            Base
        length : int
            Number of digits

        Returns
        -------
        solharm.dynsys.Expansion
            Expansion whose orbit is the exact orbit of the rational ``t``
        """
        x = Fraction(float(t)) % 1
        d = np.empty(length, dtype=np.int64)
        for k in range(length):
            x *= N
            d[k] = int(x)
            x -= d[k]
        return cls(N, d)

    def __len__(self) -> int:
        return self.digits.shape[0]

    def value(self) -> float:
        return float(self.orbit(1)[0])

    def orbit(self, n: int) -> np.ndarray:
        """
        Forward orbit ``t, r(t), ..., r^{n-1}(t)``

        Parameters
        ----------
        n : int
            Orbit length

        Returns
        -------
        numpy.ndarray
            Orbit angles in double precision

        Raises
        ------
        solharm.errors.TruncationError
            If fewer than ``n - 1 + precision`` digits are available.
        """
        need = n - 1 + self.precision
        if len(self) < need:
            raise TruncationError(f"orbit of length {n} requires {need} digits, " +
                                  f"but {len(self)}")
        scale = float(self.N) ** -(np.arange(self.precision) + 1)
        win = np.lib.stride_tricks.sliding_window_view(self.digits, self.precision)
        return reduce_angle(win[:n] @ scale)


@dataclass(frozen=True)
class Quadrature:
    """
    Quadrature value with error estimate from panel refinement
    """
    value: complex
    error: float


def reduce_angle(t: ArrayLike) -> ArrayLike:
    """
    Reduce angles into [0, 1)
    """
    y = np.mod(t, 1.0)
    y = np.where(y >= 1.0, 0.0, y)
    if np.ndim(y) == 0:
        return float(y)
    return y


def apply_r(sys: SystemSpec, x: Point) -> Point:
    """
    Apply the map ``r``

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        System
    x : float, numpy.ndarray or label
        Point(s). Circle systems accept arrays.

    Returns
    -------
    float, numpy.ndarray or label
        ``r(x)``; ``N x mod 1`` for circle systems, parent for tree systems.

    Raises
    ------
    solharm.errors.TruncationError
        If ``x`` is the root of a tree system.
    """
    if sys.is_circle:
        return reduce_angle(sys.N * np.asarray(x, dtype=float))
    return sys.source.parent(x)  # type: ignore


def preimages(sys: SystemSpec, x: Point) -> Tuple[Point, ...]:
    """
    All ``y`` with ``r(y) = x`` in canonical order

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        System
    x : float or label
        Point

    Returns
    -------
    tuple
        Ascending angles ``(x + k) / N`` for circle systems,
        declared children for tree systems.
    """
    if sys.is_circle:
        x = reduce_angle(float(x))  # type: ignore
        return tuple(float((x + k) / sys.N) for k in range(sys.N))
    return sys.source.children(x)  # type: ignore


def preimage_grid(sys: SystemSpec, x: ArrayLike) -> np.ndarray:
    """
    Vectorized preimages, output shape ``(*x.shape, N)``
    """
    sys.require_circle("preimage_grid")
    x = np.asarray(x, dtype=float)
    return (x[..., None] + np.arange(sys.N)) / sys.N


def points_equal(sys: SystemSpec, a: Point, b: Point, tol: Optional[float] = None) -> bool:
    """
    Point equality

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        System
    a, b : float or label
        Points
    tol : float, optional
        Circular distance tolerance. The default is ``POINT_TOL``, or
        ``N 2^-53`` when ``sys.exact``.

    Returns
    -------
    bool
        Whether ``a`` and ``b`` are the same point

    Notes
    -----
    For power-of-two ``N`` the map ``r`` is exact in binary and a preimage
    ``(x + k) / N`` rounds at most once, in the sum. The default tolerance
    of exact systems is that single rounding, so ``r(y) == x`` holds
    bitwise for angles with at most ``53 - log2(N)`` binary digits and up
    to one rounding otherwise.
    """
    if not sys.is_circle:
        return a == b
    if tol is None:
        tol = sys.N * EXACT_ULP if sys.exact else POINT_TOL
    return points_close(a, b, tol)


def points_close(a: Point, b: Point, tol: float = POINT_TOL) -> bool:
    """
    Whether the circular distance of two angles is at most ``tol``
    """
    d = abs(float(a) - float(b)) % 1.0  # type: ignore
    return min(d, 1.0 - d) <= tol


def _edges(panels: int, breakpoints: Iterable[float]) -> np.ndarray:
    base = np.linspace(0.0, 1.0, panels + 1)
    h = 1.0 / panels
    extra = []
    for b in breakpoints:
        b = float(b) % 1.0
        extra.append(b)
        for k in range(1, GRADING_LEVELS + 1):
            d = h * GRADING_RATIO ** k
            extra.extend(((b + d) % 1.0, (b - d) % 1.0))
    return np.unique(np.concatenate((base, np.asarray(extra, dtype=float))))


def _gauss(f: CircleFunction, edges: np.ndarray, nodes: int) -> complex:
    x, w = np.polynomial.legendre.leggauss(nodes)
    a = edges[:-1, None]
    half = 0.5 * (edges[1:, None] - a)
    pts = a + half * (x + 1.0)
    values = np.asarray(f(pts), dtype=complex)
    if values.shape != pts.shape:
        values = np.broadcast_to(values, pts.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        t = pts[bad][0]
        raise SolharmError(f"Integrand is not finite at t={t!r}")
    return complex(np.sum(values * (half * w)))


def integrate_mu(sys: SystemSpec, f: CircleFunction, *,
                 panels: Optional[int] = None,
                 breakpoints: Iterable[float] = ()) -> Quadrature:
    """
    Integrate over the Haar measure with composite Gauss-Legendre quadrature

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    f : callable
        Vectorized integrand on angles
    panels : int, optional
        Panel count. If ``None`` (default), ``sys.panels`` is used.
    breakpoints : iterable of floats, optional
        Singular or discontinuous points of ``f``. Panels are split at them
        and geometrically graded towards them, so that no node is placed
        on a breakpoint.

    Returns
    -------
    solharm.dynsys.Quadrature
        Value and error estimate ``|I(panels) - I(panels/2)|``

    Raises
    ------
    solharm.errors.SolharmError
        If ``sys`` is not a circle system, or ``f`` is not finite at a node.
    """
    sys.require_circle("integrate_mu")
    P = sys.panels if panels is None else int(panels)
    bp = tuple(breakpoints)

    fine = _gauss(f, _edges(P, bp), sys.nodes)
    coarse = _gauss(f, _edges(max(P // 2, 1), bp), sys.nodes)
    return Quadrature(fine, abs(fine - coarse))


def average_preimages(sys: SystemSpec, f: CircleFunction) -> CircleFunction:
    """
    Function ``x -> (1/N) sum_{r(y)=x} f(y)``
    """
    sys.require_circle("average_preimages")
    return lambda x: np.mean(f(preimage_grid(sys, x)), axis=-1)


def strong_invariance_residual(sys: SystemSpec, f: CircleFunction) -> float:
    """
    Residual of strong invariance for a test function

    Returns
    -------
    float
        ``|int f dmu - int (1/N) sum_{r(y)=x} f(y) dmu(x)|``
    """
    lhs = integrate_mu(sys, f).value
    rhs = integrate_mu(sys, average_preimages(sys, f)).value
    return abs(lhs - rhs)


def sample_mu(sys: SystemSpec, seed: Union[int, PRNG, None],
              size: Optional[int] = None) -> ArrayLike:
    """
    Sample Haar distributed angles

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    seed : int or solharm.random.PRNG
        Seed or random stream
    size : int, optional
        Number of samples. If ``None`` (default), a single float is returned.

    Returns
    -------
    float or numpy.ndarray
        Uniform angles in [0, 1). Draw ``i`` is deterministic given the seed.
    """
    sys.require_circle("sample_mu")
    rng = seed if isinstance(seed, PRNG) else PCG64(seed)
    if size is None:
        return float(rng.random(shape=(1,))[0])
    return rng.random(shape=(size,))


def sample_expansion(sys: SystemSpec, n_digits: int,
                     seed: Union[int, PRNG, None]) -> Expansion:
    """
    Sample a Haar distributed point with independent uniform digits

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system with ``N >= 2``
    n_digits : int
        Number of digits
    seed : int or solharm.random.PRNG
        Seed or random stream

    Returns
    -------
    solharm.dynsys.Expansion
        Random point
    """
    sys.require_circle("sample_expansion")
    rng = seed if isinstance(seed, PRNG) else PCG64(seed)
    return Expansion(sys.N, rng.randrange(shape=(n_digits,), low=0, high=sys.N))
