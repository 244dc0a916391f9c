"""
Solenoid Module (:mod:`solharm.solenoid`)
=========================================

Monte Carlo realization of the solenoid ``X_inf`` of a circle system,
its measure ``mu_inf``, the shift ``r_inf`` and the operators

* ``(U xi)(z) = m0(theta_0 z) xi(r_inf z)``
* ``(pi(f) xi)(z) = f(theta_0 z) xi(z)``

on ``L^2(mu_inf)``.

A solenoid point is stored as a window of coordinates

``w = (r^F(x0), ..., r(x0), x0, x1, ..., xL)``

with ``x0`` at index ``origin``. ``theta_m`` reads ``w[origin + m]``, and
``r_inf`` moves the origin, so it never loses data. Operations raise
``TruncationError`` when the window is exhausted.


Examples
--------
>>> import numpy as np
>>> from solharm import dynsys, filter, solenoid
>>> sys = dynsys.SystemSpec("circle", N=2)
>>> haar = filter.bundled_filter("haar")
>>> z = solenoid.sample_mu_inf(sys, haar, length=32, forward=8, seed=0)
>>> y = solenoid.r_inf(z, "forward")
>>> y.theta(0) == dynsys.apply_r(sys, z.theta(0))
True

Vectorized batches share the same interface.

>>> Z = solenoid.sample_mu_inf_batch(sys, haar, 1000, seed=0)
>>> est = solenoid.mc_expectation(sys, haar, solenoid.Theta(np.cos, 0), 1000, seed=0)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union
from typing_extensions import Literal

import numpy as np
import wblog

from .dynsys import ArcSet, SystemSpec, integrate_mu, reduce_angle
from .errors import FilterZeroError, SolharmError, TruncationError
from .filter import ZERO_TOL, FilterSpec, cocycle_from_coords
from .random import PRNG, map_blocks
from .boundary import PathPrefix, walk_batch
from .soltyping import ArrayLike, CircleFunction

__all__ = [
    "SolenoidSample",
    "SolenoidBatch",
    "SolenoidFunction",
    "Constant",
    "Theta",
    "ArcCylinder",
    "SolenoidOperator",
    "U",
    "U_inv",
    "Pi",
    "MCEstimate",
    "r_inf",
    "sample_mu_inf",
    "sample_mu_inf_batch",
    "sample_cocycle_mod2",
    "apply_U",
    "apply_U_inv",
    "apply_pi",
    "mc_values",
    "mc_expectation",
    "forward_product",
    "theta_marginal_check",
]

logger = wblog.getLogger()

DEFAULT_LENGTH = 32
DEFAULT_FORWARD = 8


class _Window:
    """
    Base class of solenoid windows
    """
    def __init__(self, sys: SystemSpec, window: np.ndarray, origin: int):
        if not (0 <= origin < window.shape[-1]):
            raise ValueError(f"`origin` must be in [0, {window.shape[-1]}), but {origin}")
        window = np.asarray(window, dtype=float)
        window.setflags(write=False)
        self.sys = sys
        self.window = window
        self.origin = origin

    @property
    def forward_budget(self) -> int:
        """
        Remaining forward steps ``F``
        """
        return self.origin

    @property
    def length(self) -> int:
        """
        Remaining backward length ``L``
        """
        return self.window.shape[-1] - 1 - self.origin

    def theta(self, m: int) -> ArrayLike:
        """
        Coordinate ``theta_m``. Negative ``m`` reads the forward orbit.

        Raises
        ------
        solharm.errors.TruncationError
            If ``m`` is outside ``[-F, L]``.
        """
        i = self.origin + m
        if not (0 <= i < self.window.shape[-1]):
            raise TruncationError(f"truncation exhausted: theta_{m} outside " +
                                  f"[-{self.forward_budget}, {self.length}]")
        return self.window[..., i]

    def forward_coords(self) -> np.ndarray:
        """
        ``x0, r(x0), ..., r^F(x0)`` along the last axis
        """
        return self.window[..., self.origin::-1]

    def backward_coords(self) -> np.ndarray:
        """
        ``x1, ..., xL`` along the last axis
        """
        return self.window[..., self.origin + 1:]

    def _shifted(self, origin: int):
        raise NotImplementedError

    def shift(self, n: int):
        """
        ``r_inf^n``

        Raises
        ------
        solharm.errors.TruncationError
            If the budget of the direction is exhausted.
        """
        if n > self.forward_budget:
            raise TruncationError(f"truncation exhausted: forward budget " +
                                  f"{self.forward_budget} < {n}")
        if -n > self.length:
            raise TruncationError(f"truncation exhausted: backward length " +
                                  f"{self.length} < {-n}")
        return self._shifted(self.origin - n)


class SolenoidSample(_Window):
    """
    Single solenoid point

    Notes
    -----
    ``theta(m)`` returns a float.
    """
    def __init__(self, sys: SystemSpec, window: np.ndarray, origin: int):
        """
        Initialize SolenoidSample

        Parameters
        ----------
        sys : solharm.dynsys.SystemSpec
            Circle system
        window : numpy.ndarray
            1-dimensional coordinate window
        origin : int
            Index of ``x0`` in ``window``
        """
        super().__init__(sys, window, origin)
        if self.window.ndim != 1:
            raise ValueError(f"`window` must be 1-dimensional, but {self.window.shape}")

    def theta(self, m: int) -> float:
        return float(super().theta(m))

    def _shifted(self, origin: int) -> SolenoidSample:
        return SolenoidSample(self.sys, self.window, origin)

    def prefix(self) -> PathPrefix:
        """
        Backward prefix ``(x0, ..., xL)``
        """
        return PathPrefix(self.sys, self.window[self.origin:], check=False)

    def __repr__(self) -> str:
        return f"<SolenoidSample(x0={self.theta(0)}, F={self.forward_budget}, L={self.length})>"


class SolenoidBatch(_Window):
    """
    Batch of solenoid points

    Notes
    -----
    ``window`` has shape ``(n, F + L + 1)``; all points share one origin.
    """
    def __init__(self, sys: SystemSpec, window: np.ndarray, origin: int):
        super().__init__(sys, window, origin)
        if self.window.ndim != 2:
            raise ValueError(f"`window` must be 2-dimensional, but {self.window.shape}")

    def __len__(self) -> int:
        return self.window.shape[0]

    def __getitem__(self, i: int) -> SolenoidSample:
        return SolenoidSample(self.sys, self.window[i], self.origin)

    def _shifted(self, origin: int) -> SolenoidBatch:
        return SolenoidBatch(self.sys, self.window, origin)

    def __repr__(self) -> str:
        return (f"<SolenoidBatch(n={len(self)}, F={self.forward_budget}, " +
                f"L={self.length})>")


Window = Union[SolenoidSample, SolenoidBatch]


def r_inf(z: Window, direction: Literal["forward", "backward"] = "forward") -> Window:
    """
    Apply ``r_inf`` or its inverse

    Parameters
    ----------
    z : solharm.solenoid.SolenoidSample or SolenoidBatch
        Solenoid point(s)
    direction : {"forward", "backward"}, optional
        ``"forward"`` prepends ``r(x0)``, ``"backward"`` drops ``x0``.
        The default is ``"forward"``.

    Returns
    -------
    solharm.solenoid.SolenoidSample or SolenoidBatch
        Shifted point(s)

    Raises
    ------
    solharm.errors.TruncationError
        If the budget of the direction is exhausted.
    """
    if direction == "forward":
        return z.shift(1)
    if direction == "backward":
        return z.shift(-1)
    raise ValueError(f"`direction` must be 'forward' or 'backward', but {direction!r}")


def _windows(sys: SystemSpec, filter: FilterSpec, count: int,
             length: int, forward: int, rng: PRNG) -> np.ndarray:
    x0 = rng.random(shape=(count,))
    path = walk_batch(sys, filter, x0, length, rng)
    fwd = np.empty((count, forward + 1))
    fwd[:, 0] = x0
    for j in range(1, forward + 1):
        fwd[:, j] = reduce_angle(sys.N * fwd[:, j - 1])
    return np.concatenate((fwd[:, :0:-1], path), axis=1)


def sample_mu_inf_batch(sys: SystemSpec, filter: FilterSpec, n: int, *,
                        length: int = DEFAULT_LENGTH,
                        forward: int = DEFAULT_FORWARD,
                        seed: Optional[int] = None) -> SolenoidBatch:
    """
    Sample ``n`` points of ``mu_inf``

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    filter : solharm.filter.FilterSpec
        QMF filter
    n : int
        Number of samples
    length : int, optional
        Backward length ``L``. The default is ``32``.
    forward : int, optional
        Forward budget ``F``. The default is ``8``.
    seed : int, optional
        Random seed

    Returns
    -------
    solharm.solenoid.SolenoidBatch
        ``x0 ~ mu`` followed by the ``W``-walk. Deterministic per seed.
    """
    sys.require_circle("sample_mu_inf")
    filter.require_qmf(sys)
    if length < 0 or forward < 0:
        raise ValueError(f"`length` and `forward` must be non negative, " +
                         f"but {length}, {forward}")
    w = map_blocks(lambda c, rng: _windows(sys, filter, c, length, forward, rng),
                   n, seed=seed)
    return SolenoidBatch(sys, w, forward)


def sample_mu_inf(sys: SystemSpec, filter: FilterSpec, *,
                  length: int = DEFAULT_LENGTH,
                  forward: int = DEFAULT_FORWARD,
                  seed: Optional[int] = None) -> SolenoidSample:
    """
    Sample a single point of ``mu_inf``

    See Also
    --------
    solharm.solenoid.sample_mu_inf_batch
    """
    return sample_mu_inf_batch(sys, filter, 1, length=length,
                               forward=forward, seed=seed)[0]


def sample_cocycle_mod2(filter: FilterSpec, z: Window, n: int) -> ArrayLike:
    """
    ``|m~_n(z)|^2`` from the window of solenoid point(s)

    Raises
    ------
    solharm.errors.TruncationError
        If the window has fewer than ``|n|`` coordinates in the direction.
    solharm.errors.FilterZeroError
        If a factor vanishes.
    """
    c = cocycle_from_coords(filter, z.forward_coords(), z.backward_coords(), n)
    return float(c) if np.ndim(c) == 0 else c


class SolenoidFunction:
    """
    Abstract base class of functions on the solenoid

    Notes
    -----
    Subclass must implement ``__call__(z)``, which evaluates on a
    ``SolenoidSample`` or vectorized on a ``SolenoidBatch``.
    """
    def __call__(self, z: Window) -> ArrayLike:
        raise NotImplementedError


class Constant(SolenoidFunction):
    """
    Constant function, ``Constant(1)`` is the scaling vector ``phi``
    """
    def __init__(self, c: complex = 1.0):
        self.c = c

    def __call__(self, z: Window) -> ArrayLike:
        if isinstance(z, SolenoidBatch):
            return np.full(len(z), self.c)
        return self.c


class Theta(SolenoidFunction):
    """
    ``f(theta_m z)``
    """
    def __init__(self, f: CircleFunction, m: int = 0):
        self.f = f
        self.m = m

    def __call__(self, z: Window) -> ArrayLike:
        return self.f(z.theta(self.m))


class ArcCylinder(SolenoidFunction):
    """
    Cylinder indicator ``prod_j chi_{A_j}(theta_{start + j} z)``
    """
    def __init__(self, arcs: Sequence[ArcSet], start: int = 0):
        """
        Initialize ArcCylinder

        Parameters
        ----------
        arcs : sequence of solharm.dynsys.ArcSet
            Arc set of each coordinate
        start : int, optional
            First coordinate. The default is ``0``.
        """
        self.arcs = tuple(arcs)
        self.start = start

    def __call__(self, z: Window) -> ArrayLike:
        out = np.ones(np.shape(z.theta(self.start)))
        for j, A in enumerate(self.arcs):
            out = out * A.contains(z.theta(self.start + j))
        return float(out) if out.ndim == 0 else out


class SolenoidOperator:
    """
    Abstract base class of operators on solenoid functions

    Notes
    -----
    Operators compose lazily with ``@``; ``(A @ B)(xi) = A(B(xi))``.
    """
    def apply(self, xi: SolenoidFunction, z: Window) -> ArrayLike:
        """
        Evaluate ``(A xi)(z)``

        Notes
        -----
        Subclass must implement this method.
        """
        raise NotImplementedError

    def __call__(self, xi: SolenoidFunction) -> SolenoidFunction:
        op = self

        class _Applied(SolenoidFunction):
            def __call__(self, z: Window) -> ArrayLike:
                return op.apply(xi, z)
        return _Applied()

    def __matmul__(self, other: SolenoidOperator) -> SolenoidOperator:
        outer = self

        class _Composed(SolenoidOperator):
            def apply(self, xi: SolenoidFunction, z: Window) -> ArrayLike:
                return outer.apply(other(xi), z)
        return _Composed()


class U(SolenoidOperator):
    """
    ``(U xi)(z) = m0(theta_0 z) xi(r_inf z)``
    """
    def __init__(self, filter: FilterSpec):
        self.filter = filter

    def apply(self, xi: SolenoidFunction, z: Window) -> ArrayLike:
        return apply_U(self.filter, xi, z)


class U_inv(SolenoidOperator):
    """
    ``(U^-1 xi)(z) = xi(r_inf^-1 z) / m0(theta_0(r_inf^-1 z))``
    """
    def __init__(self, filter: FilterSpec):
        self.filter = filter

    def apply(self, xi: SolenoidFunction, z: Window) -> ArrayLike:
        return apply_U_inv(self.filter, xi, z)


class Pi(SolenoidOperator):
    """
    ``(pi(f) xi)(z) = f(theta_0 z) xi(z)``
    """
    def __init__(self, f: CircleFunction):
        self.f = f

    def apply(self, xi: SolenoidFunction, z: Window) -> ArrayLike:
        return apply_pi(self.f, xi, z)


def apply_U(filter: FilterSpec, xi: SolenoidFunction, z: Window) -> ArrayLike:
    """
    ``(U xi)(z) = m0(theta_0 z) xi(r_inf z)``

    Raises
    ------
    solharm.errors.TruncationError
        If the forward budget is exhausted.
    """
    return filter.m0(z.theta(0)) * xi(z.shift(1))


def apply_U_inv(filter: FilterSpec, xi: SolenoidFunction, z: Window) -> ArrayLike:
    """
    ``(U^-1 xi)(z) = xi(r_inf^-1 z) / m0(theta_0(r_inf^-1 z))``

    Raises
    ------
    solharm.errors.TruncationError
        If the backward length is exhausted.
    solharm.errors.FilterZeroError
        If ``|m0| < 1e-14`` at ``theta_1 z``.
    """
    y = z.shift(-1)
    m = filter.m0(y.theta(0))
    small = np.abs(m) < ZERO_TOL
    if np.any(small):
        t = np.asarray(y.theta(0))[small] if np.ndim(m) else y.theta(0)
        raise FilterZeroError(f"filter zero on orbit at t={np.ravel(t)[0]!r}")
    return xi(y) / m


def apply_pi(f: CircleFunction, xi: SolenoidFunction, z: Window) -> ArrayLike:
    """
    ``(pi(f) xi)(z) = f(theta_0 z) xi(z)``
    """
    return f(z.theta(0)) * xi(z)


@dataclass(frozen=True)
class MCEstimate:
    """
    Monte Carlo estimate

    Attributes
    ----------
    mean : complex
        Sample mean
    stderr : float
        Standard error of the mean
    n : int
        Number of samples
    """
    mean: complex
    stderr: float
    n: int

    def within(self, value: complex, k: float = 4.0) -> bool:
        """
        Whether ``|mean - value| <= k stderr``
        """
        return bool(abs(self.mean - value) <= k * self.stderr)


def mc_values(sys: SystemSpec, filter: FilterSpec,
              integrand: Callable[[SolenoidBatch], ArrayLike],
              n: int, seed: Optional[int], *,
              length: int = DEFAULT_LENGTH,
              forward: int = DEFAULT_FORWARD) -> np.ndarray:
    """
    Evaluate an integrand on ``n`` samples of ``mu_inf``

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    filter : solharm.filter.FilterSpec
        QMF filter
    integrand : callable
        Vectorized function of ``SolenoidBatch``
    n : int
        Number of samples
    seed : int
        Random seed
    length : int, optional
        Backward length ``L``. The default is ``32``.
    forward : int, optional
        Forward budget ``F``. The default is ``8``.

    Returns
    -------
    numpy.ndarray
        Integrand values in sample order

    Raises
    ------
    solharm.errors.SolharmError
        If a value is not finite. The message names the sample index.
    """
    sys.require_circle("mc_values")
    filter.require_qmf(sys)

    def block(c: int, rng: PRNG) -> np.ndarray:
        Z = SolenoidBatch(sys, _windows(sys, filter, c, length, forward, rng), forward)
        return np.broadcast_to(np.asarray(integrand(Z)), (c,)).astype(complex)

    v = map_blocks(block, n, seed=seed)
    bad = np.flatnonzero(~np.isfinite(v))
    if bad.shape[0] > 0:
        raise SolharmError(f"Integrand is not finite at sample {int(bad[0])}: {v[bad[0]]}")
    return v


def _estimate(v: np.ndarray) -> MCEstimate:
    n = v.shape[0]
    m = complex(np.mean(v))
    s = float(np.std(v, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return MCEstimate(m, s, n)


def mc_expectation(sys: SystemSpec, filter: FilterSpec,
                   integrand: Callable[[SolenoidBatch], ArrayLike],
                   n: int, seed: Optional[int], *,
                   length: int = DEFAULT_LENGTH,
                   forward: int = DEFAULT_FORWARD) -> MCEstimate:
    """
    Monte Carlo expectation under ``mu_inf``

    Returns
    -------
    solharm.solenoid.MCEstimate
        Sample mean and standard error. A constant integrand gives
        its exact value and zero standard error.

    See Also
    --------
    solharm.solenoid.mc_values
    """
    return _estimate(mc_values(sys, filter, integrand, n, seed,
                               length=length, forward=forward))


def forward_product(filter: FilterSpec, x: ArrayLike, m: int) -> np.ndarray:
    """
    ``|m0(x) m0(r(x)) ... m0(r^{m-1}(x))|^2``
    """
    y = np.asarray(x, dtype=float)
    p = np.ones(y.shape)
    for _ in range(m):
        p = p * filter.abs2(y)
        y = reduce_angle(filter.N * y)
    return p


def theta_marginal_check(sys: SystemSpec, filter: FilterSpec, f: CircleFunction,
                         m: int, n: int, seed: Optional[int]) -> MCEstimate:
    """
    Estimate ``E[f(theta_m z)] - int f |m~_m|^2 dmu``

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    filter : solharm.filter.FilterSpec
        QMF filter
    f : callable
        Vectorized test function
    m : int
        Coordinate, ``m >= 0``
    n : int
        Number of samples
    seed : int
        Random seed

    Returns
    -------
    solharm.solenoid.MCEstimate
        Difference estimate, compatible with ``0``.

    Notes
    -----
    The law of ``theta_m`` under ``mu_inf`` has density
    ``|m0(x) ... m0(r^{m-1}(x))|^2`` with respect to ``mu``.
    It is ``mu`` itself for ``m = 0`` or constant ``|m0|``.
    """
    if m < 0:
        raise ValueError(f"`m` must be non negative, but {m}")
    exact = integrate_mu(sys, lambda t: f(t) * forward_product(filter, t, m)).value
    v = mc_values(sys, filter, Theta(f, m), n, seed, length=max(m, 1))
    return _estimate(v - exact)
