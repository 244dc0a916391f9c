"""
Harmonic Module (:mod:`solharm.harmonic`)
=========================================

Node functions on truncated trees and their correspondences;

* additive ``nu`` <-> p-harmonic ``u = nu / W^(n)``
* positive additive ``nu`` <-> QMF-weight ``U(x) = nu(x) / nu(r(x))``
* Martin representation ``u(x) = nu(V_{..., x}) / W^(n(x))(x)``
* families ``nu_{x0}`` of ``R_W``-harmonic functions across roots

Role laws are validated at internal nodes only; leaf values are free
boundary data of the truncation.


Examples
--------
>>> from solharm import dynsys, filter, tree, harmonic
>>> from solharm.random import PCG64
>>> sys = dynsys.SystemSpec("circle", N=2)
>>> T = tree.build_tree(sys, filter.bundled_filter("haar"), 0.1234477851, 6)
>>> nu = harmonic.random_additive(T, PCG64(0))
>>> u = harmonic.additive_to_harmonic(T, nu)
>>> harmonic.validate(u).ok
True
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import wblog

from .dynsys import SystemSpec, apply_r, points_equal
from .errors import RegularityError, SolharmError, TruncationError
from .filter import FilterSpec
from .random import PRNG
from .soltyping import Point
from .tree import Tree, build_tree, check_orbit

__all__ = [
    "ROLES",
    "NodeFunction",
    "ValidationReport",
    "FamilyReport",
    "validate",
    "nu0",
    "additive_to_harmonic",
    "harmonic_to_additive",
    "additive_to_weight",
    "weight_to_additive",
    "martin_represent",
    "harmonic_quotient",
    "random_weight",
    "random_additive",
    "cylinder_additive",
    "rw_harmonic_family",
]

logger = wblog.getLogger()

ROLES = ("p-harmonic", "additive", "qmf-weight", "generic")
ROLE_TOL = 1e-10
POSITIVE = 1e-300


class NodeFunction:
    """
    Real values on the nodes of a tree with a role tag
    """
    def __init__(self, tree: Tree, values: np.ndarray, role: str = "generic"):
        """
        Initialize NodeFunction

        Parameters
        ----------
        tree : solharm.tree.Tree
            Tree
        values : numpy.ndarray
            One value per node in BFS order
        role : {"p-harmonic", "additive", "qmf-weight", "generic"}, optional
            Role. The default is ``"generic"``.

        Raises
        ------
        ValueError
            If ``role`` is unknown or shape mismatches.
        """
        if role not in ROLES:
            raise ValueError(f"`role` must be one of {ROLES}, but {role!r}")
        values = np.array(values, dtype=float)
        if values.shape != (len(tree),):
            raise ValueError(f"`values` must have shape ({len(tree)},), " +
                             f"but {values.shape}")
        values.setflags(write=False)
        self.tree = tree
        self.values = values
        self.role = role

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])

    def __len__(self) -> int:
        return self.values.shape[0]

    def residuals(self, role: Optional[str] = None) -> np.ndarray:
        """
        Per node residual of a role law

        Parameters
        ----------
        role : str, optional
            Role law to evaluate. If ``None`` (default), own role is used.

        Returns
        -------
        numpy.ndarray
            Residual at internal nodes, ``0`` elsewhere.
            p-harmonic and additive residuals are relative to
            ``max(1, |value|)``. ``generic`` has no law.
        """
        role = role or self.role
        T = self.tree
        v = self.values
        res = np.zeros(len(T))
        if role == "generic" or len(T) == 1:
            return res

        w = T.W[1:] * v[1:] if role == "p-harmonic" else v[1:]
        s = np.zeros(len(T))
        np.add.at(s, T.parent[1:], w)
        inner = T.internal()

        if role == "qmf-weight":
            res[inner] = np.abs(s[inner] - 1.0)
        else:
            res[inner] = np.abs(v[inner] - s[inner]) / np.maximum(1.0, np.abs(v[inner]))
        return res

    def __repr__(self) -> str:
        return f"<NodeFunction(role={self.role}, nodes={len(self)})>"


@dataclass(frozen=True)
class ValidationReport:
    """
    Role law validation

    Attributes
    ----------
    role : str
        Validated role
    residual : float
        Maximum residual
    node : int
        Node of the maximum residual (or first negative value)
    negative : bool
        Whether a negative value was found where the role forbids it
    ok : bool
        ``residual < tol`` and not ``negative``
    """
    role: str
    residual: float
    node: int
    negative: bool
    ok: bool


def validate(f: NodeFunction, role: Optional[str] = None,
             tol: float = ROLE_TOL) -> ValidationReport:
    """
    Validate a role law

    Parameters
    ----------
    f : solharm.harmonic.NodeFunction
        Node function
    role : str, optional
        Role. If ``None`` (default), own role is used.
    tol : float, optional
        Tolerance. The default is ``1e-10``.

    Returns
    -------
    solharm.harmonic.ValidationReport
        Report
    """
    role = role or f.role
    res = f.residuals(role)
    i = int(np.argmax(res))
    negative = False
    if role in ("additive", "qmf-weight"):
        neg = np.flatnonzero(f.values < 0)
        if neg.shape[0] > 0:
            negative = True
            i = int(neg[0])
    r = float(res.max())
    return ValidationReport(role, r, i, negative, (r < tol) and not negative)


def _require(f: NodeFunction, tree: Tree, role: str):
    if f.tree is not tree:
        raise ValueError("NodeFunction belongs to another tree")
    rep = validate(f, role)
    if not rep.ok:
        raise SolharmError(f"Input is not {role} at node {rep.node} " +
                           f"(residual={rep.residual}, negative={rep.negative})")


def _require_weights(tree: Tree):
    tree.require_regular()
    low = np.flatnonzero(tree.Wn < POSITIVE)
    if low.shape[0] > 0:
        raise TruncationError(f"W^(n) underflows at node {int(low[0])}, " +
                              "reduce tree depth")


def nu0(tree: Tree) -> NodeFunction:
    """
    Additive function ``nu0 = W^(n)``
    """
    return NodeFunction(tree, tree.Wn, "additive")


def additive_to_harmonic(tree: Tree, nu: NodeFunction) -> NodeFunction:
    """
    p-harmonic function ``u = nu / W^(n)`` of an additive function

    Parameters
    ----------
    tree : solharm.tree.Tree
        Regular tree
    nu : solharm.harmonic.NodeFunction
        Additive function

    Returns
    -------
    solharm.harmonic.NodeFunction
        p-harmonic function

    Raises
    ------
    solharm.errors.SolharmError
        If ``nu`` is not additive.
    solharm.errors.TruncationError
        If ``W^(n)`` underflows below ``1e-300``.
    """
    _require(nu, tree, "additive")
    _require_weights(tree)
    return NodeFunction(tree, nu.values / tree.Wn, "p-harmonic")


def harmonic_to_additive(tree: Tree, u: NodeFunction) -> NodeFunction:
    """
    Additive function ``nu = u W^(n)`` of a non negative p-harmonic function

    Raises
    ------
    solharm.errors.SolharmError
        If ``u`` is not p-harmonic or has a negative value.
    """
    _require(u, tree, "p-harmonic")
    neg = np.flatnonzero(u.values < 0)
    if neg.shape[0] > 0:
        raise SolharmError(f"p-harmonic function is negative at node {int(neg[0])}")
    return NodeFunction(tree, u.values * tree.Wn, "additive")


def additive_to_weight(tree: Tree, nu: NodeFunction) -> NodeFunction:
    """
    QMF-weight ``U(x) = nu(x) / nu(r(x))`` of a positive additive function

    Returns
    -------
    solharm.harmonic.NodeFunction
        QMF-weight. Root value is ``1`` by convention.

    Raises
    ------
    solharm.errors.SolharmError
        If ``nu`` is not additive or not strictly positive.
    """
    _require(nu, tree, "additive")
    low = np.flatnonzero(nu.values < POSITIVE)
    if low.shape[0] > 0:
        raise SolharmError(f"Additive function vanishes at node {int(low[0])}")

    U = np.ones(len(tree))
    U[1:] = nu.values[1:] / nu.values[tree.parent[1:]]
    return NodeFunction(tree, U, "qmf-weight")


def weight_to_additive(tree: Tree, U: NodeFunction, mass: float = 1.0) -> NodeFunction:
    """
    Additive function ``nu(x) = mass U(x) U(r(x)) ... U(r^{n(x)-1}(x))``

    Parameters
    ----------
    tree : solharm.tree.Tree
        Tree
    U : solharm.harmonic.NodeFunction
        QMF-weight
    mass : float, optional
        Root mass ``nu(x0) >= 0``. The default is ``1.0``.

    Returns
    -------
    solharm.harmonic.NodeFunction
        Additive function
    """
    _require(U, tree, "qmf-weight")
    if mass < 0:
        raise ValueError(f"`mass` must be non negative, but {mass}")

    nu = np.empty(len(tree))
    nu[0] = mass
    for i in range(1, len(tree)):
        nu[i] = nu[tree.parent[i]] * U.values[i]
    return NodeFunction(tree, nu, "additive")


def martin_represent(tree: Tree, nu: NodeFunction) -> NodeFunction:
    """
    Martin representation ``u(x) = nu(V_{x0, ..., x}) / W^(n(x))(x)``

    Parameters
    ----------
    tree : solharm.tree.Tree
        Regular tree
    nu : solharm.harmonic.NodeFunction
        Additive function read as a measure on boundary cylinders

    Returns
    -------
    solharm.harmonic.NodeFunction
        p-harmonic function

    Notes
    -----
    The cylinder of a node ``x`` is the set of boundary points whose path
    passes through ``x``, its mass is ``nu(x)``.
    The result agrees exactly with ``additive_to_harmonic()``.
    """
    _require(nu, tree, "additive")
    _require_weights(tree)
    cylinder = nu.values
    return NodeFunction(tree, cylinder / tree.Wn, "p-harmonic")


def harmonic_quotient(tree: Tree, u: NodeFunction) -> Tuple[NodeFunction, NodeFunction]:
    """
    Write p-harmonic ``u`` as quotient ``nu / nu0`` of additive functions

    Returns
    -------
    nu : solharm.harmonic.NodeFunction
        Numerator ``u nu0``
    nu0 : solharm.harmonic.NodeFunction
        Denominator ``W^(n)``
    """
    return harmonic_to_additive(tree, u), nu0(tree)


def random_weight(tree: Tree, rng: PRNG) -> NodeFunction:
    """
    Random QMF-weight, uniform on the simplex at each internal node
    """
    U = np.ones(len(tree))
    inner = tree.internal()
    sizes = {len(tree.children[i]) for i in inner}
    if len(sizes) == 1:
        k = sizes.pop()
        p = rng.dirichlet(k, shape=(inner.shape[0],))
        ch = np.asarray([tree.children[i] for i in inner], dtype=np.int64)
        U[ch.reshape(-1)] = p.reshape(-1)
    else:
        for i in inner:
            U[list(tree.children[i])] = rng.dirichlet(len(tree.children[i]))
    return NodeFunction(tree, U, "qmf-weight")


def random_additive(tree: Tree, rng: PRNG, mass: float = 1.0) -> NodeFunction:
    """
    Random positive additive function through a random QMF-weight
    """
    return weight_to_additive(tree, random_weight(tree, rng), mass)


def cylinder_additive(tree: Tree, node: int, mass: float = 1.0) -> NodeFunction:
    """
    Additive function of a boundary measure concentrated on one cylinder

    Parameters
    ----------
    tree : solharm.tree.Tree
        Tree
    node : int
        Cylinder node ``c``
    mass : float, optional
        Total mass. The default is ``1.0``.

    Returns
    -------
    solharm.harmonic.NodeFunction
        ``mass`` on ancestors of ``c``, ``mass W^(n)(x) / W^(n)(c)`` on
        ``T(c)`` and ``0`` elsewhere.
    """
    nu = np.zeros(len(tree))
    n = int(tree.level[node])
    nu[tree.anc[:n + 1, node]] = mass

    inside = np.asarray([tree.in_subtree(node, y) for y in range(len(tree))])
    inside[node] = False
    nu[inside] = mass * tree.Wn[inside] / tree.Wn[node]
    return NodeFunction(tree, nu, "additive")


@dataclass
class FamilyReport:
    """
    Family ``nu_{x0}`` of additive functions of an ``R_W``-harmonic function

    Attributes
    ----------
    roots : list
        Roots
    trees : list of solharm.tree.Tree
        Tree of each root
    nus : list of solharm.harmonic.NodeFunction
        ``nu_{x0} = h W^(n)`` on each tree
    additivity : float
        Maximum ``|nu(x) - sum_y nu(y)| / W^(n)(x)`` at internal nodes,
        that is ``|h - R_W h|`` at the nodes.
    compatibility : float
        Maximum ``|nu_{r(x0)}(x) - W(x0) nu_{x0}(x)|`` over nested roots
    reconstruction : float
        Maximum ``|h(x) - nu_{r(x)}(x) / W(x)|`` and ``|h(x) - nu_x(x)|``
    nested : int
        Number of nested root pairs
    depth : int
        Depth of validity of ``compatibility`` (tree depth minus one)
    """
    roots: List[Point]
    trees: List[Tree]
    nus: List[NodeFunction]
    additivity: float
    compatibility: float
    reconstruction: float
    nested: int
    depth: int

    def passed(self, tol: float) -> bool:
        return max(self.additivity, self.compatibility, self.reconstruction) < tol


def _embed(inner: Tree, outer: Tree, at: int) -> np.ndarray:
    # index in outer of inner nodes up to depth outer.depth - 1
    m = np.full(len(inner), -1, dtype=np.int64)
    m[0] = at
    for i in range(len(inner)):
        if m[i] < 0 or outer.level[m[i]] >= outer.depth:
            continue
        for a, b in zip(inner.children[i], outer.children[m[i]]):
            m[a] = b
    return m


def rw_harmonic_family(sys: SystemSpec, filter: FilterSpec,
                       h: Callable[[np.ndarray], np.ndarray],
                       roots: Sequence[Point], depth: int) -> FamilyReport:
    """
    Additive family of a function ``h`` on the circle

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    filter : solharm.filter.FilterSpec
        QMF filter
    h : callable
        Vectorized real function on angles
    roots : sequence of floats
        Roots ``x0``
    depth : int
        Tree depth

    Returns
    -------
    solharm.harmonic.FamilyReport
        Family with residuals. Residuals are small iff ``h`` is
        ``R_W``-harmonic on the nodes.

    Raises
    ------
    solharm.errors.RegularityError
        If a root or its forward orbit up to ``depth`` is not regular.
    """
    sys.require_circle("rw_harmonic_family")
    trees = []
    nus = []
    add_res = 0.0
    rec_res = 0.0
    for x0 in roots:
        orbit = check_orbit(sys, filter, x0, depth)
        if not orbit.regular:
            raise RegularityError(f"forward orbit of root {x0!r} is not regular",
                                  orbit.witness)
        T = build_tree(sys, filter, x0, depth)
        T.require_regular()
        _require_weights(T)
        hv = np.asarray(h(np.asarray(T.points, dtype=float)))
        if np.iscomplexobj(hv):
            logger.debug(f"rw_harmonic_family: drop imaginary part {np.abs(hv.imag).max()}")
            hv = hv.real
        nu = NodeFunction(T, hv * T.Wn, "generic")
        trees.append(T)
        nus.append(nu)

        if len(T) > 1:
            s = np.zeros(len(T))
            np.add.at(s, T.parent[1:], nu.values[1:])
            inner = T.internal()
            add_res = max(add_res, float(np.max(np.abs(nu.values[inner] - s[inner]) /
                                                T.Wn[inner])))
            ch = np.asarray(T.children[0])
            rec_res = max(rec_res, float(np.max(np.abs(hv[ch] - nu.values[ch] / T.W[ch]))))
        rec_res = max(rec_res, abs(float(hv[0]) - nu[0]))

    cmp_res = 0.0
    nested = 0
    for a, Ta in enumerate(trees):
        ra = apply_r(sys, roots[a])
        for b, Tb in enumerate(trees):
            if a == b or not points_equal(sys, ra, roots[b]):
                continue
            try:
                at = next(c for c in Tb.children[0]
                          if points_equal(sys, Tb.points[c], roots[a]))
            except StopIteration:
                continue
            m = _embed(Ta, Tb, at)
            ok = m >= 0
            diff = nus[b].values[m[ok]] - Ta.W[0] * nus[a].values[ok]
            cmp_res = max(cmp_res, float(np.max(np.abs(diff))))
            nested += 1

    logger.debug(f"rw_harmonic_family: additivity={add_res}, " +
                 f"compatibility={cmp_res} ({nested} pairs), reconstruction={rec_res}")
    return FamilyReport(list(roots), trees, nus, add_res, cmp_res, rec_res,
                        nested, max(depth - 1, 0))
