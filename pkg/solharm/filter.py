"""
Filter Module (:mod:`solharm.filter`)
=====================================

Quadrature mirror filters ``m0(t) = sum_k h_k exp(2 pi i k t)``,
the transition weight ``W = |m0|^2 / N``, the transfer operator
``R_W g(x) = sum_{r(y)=x} W(y) g(y)``, the Lyapunov integral
``a = int log|m0|^2 dmu`` and squared moduli of the cocycle ``m~_n``.


Examples
--------
>>> from solharm import dynsys, filter
>>> sys = dynsys.SystemSpec("circle", N=2)
>>> haar = filter.bundled_filter("haar")
>>> round(filter.eval_w(haar, sys, 1/6), 12)
0.75

Trigonometric polynomials are transferred exactly on their coefficients.

>>> g = filter.TrigPoly([0, 0, 1])  # exp(2 pi i t)
>>> Rg = filter.transfer_apply(haar, sys, g)  # (1 + exp(2 pi i t)) / 2
>>> Rg.degree
1
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import wblog

from .dynsys import (
    SystemSpec, integrate_mu, preimage_grid, reduce_angle
)
from .errors import ConfigError, FilterZeroError, NonQMFError, TruncationError
from .random import PRNG
from .soltyping import ArrayLike, CircleFunction, Point

__all__ = [
    "TrigPoly",
    "FilterSpec",
    "LyapunovReport",
    "bundled_filter",
    "eval_w",
    "qmf_residual",
    "mean_square",
    "filter_zeros",
    "transfer_apply",
    "transfer_matrix",
    "rw_harmonic_solve",
    "lyapunov",
    "cocycle_from_coords",
    "cocycle_mod2",
]

logger = wblog.getLogger()

QMF_TOL = 1e-9
EIGEN_TOL = 1e-9
ZERO_TOL = 1e-14


class TrigPoly:
    """
    Trigonometric polynomial ``g(t) = sum_{q=-D}^{D} c_q exp(2 pi i q t)``

    Notes
    -----
    Coefficients are stored in ascending frequency order, so that
    ``coeffs[q + D]`` is the coefficient of frequency ``q``.
    """
    def __init__(self, coeffs: Iterable[complex]):
        """
        Initialize TrigPoly

        Parameters
        ----------
        coeffs : iterable of complex
            ``2D + 1`` coefficients for frequencies ``-D, ..., D``

        Raises
        ------
        ValueError
            If the number of coefficients is even.
        """
        self.coeffs = np.array(coeffs, dtype=complex)
        if self.coeffs.ndim != 1 or self.coeffs.shape[0] % 2 != 1:
            raise ValueError("TrigPoly requires odd number of coefficients, " +
                             f"but {self.coeffs.shape}")

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] // 2

    @classmethod
    def constant(cls, c: complex = 1.0) -> TrigPoly:
        return cls([c])

    @classmethod
    def random(cls, degree: int, rng: PRNG) -> TrigPoly:
        """
        Random polynomial with standard complex normal coefficients
        """
        n = 2 * degree + 1
        z = rng.normal(shape=(2, n))
        return cls(z[0] + 1j * z[1])

    def pad(self, degree: int) -> TrigPoly:
        """
        Same polynomial with zero padded coefficients

        Raises
        ------
        solharm.errors.TruncationError
            If ``degree`` is smaller than non-zero part of the polynomial.
        """
        D = self.degree
        if degree >= D:
            return TrigPoly(np.pad(self.coeffs, degree - D))
        cut = D - degree
        if np.any(self.coeffs[:cut] != 0) or np.any(self.coeffs[-cut:] != 0):
            raise TruncationError(f"degree {D} polynomial doesn't fit degree {degree}")
        return TrigPoly(self.coeffs[cut:-cut])

    def __call__(self, t: ArrayLike) -> np.ndarray:
        q = np.arange(-self.degree, self.degree + 1)
        return np.exp(2j * np.pi * np.multiply.outer(np.asarray(t, dtype=float), q)) @ self.coeffs

    def __repr__(self) -> str:
        return f"<TrigPoly(degree={self.degree})>"


class FilterSpec:
    """
    Filter ``m0`` given by its coefficients

    Notes
    -----
    QMF property is validated at construction.
    If the residual exceeds ``tol``, the filter is kept but flagged,
    and every weight operation raises ``NonQMFError``.
    """
    def __init__(self,
                 coeffs: Iterable[complex],
                 name: str = "custom",
                 *,
                 N: int = 2,
                 grid: int = 4096,
                 tol: float = QMF_TOL):
        """
        Initialize FilterSpec

        Parameters
        ----------
        coeffs : iterable of complex
            Coefficients ``h_0, ..., h_K``
        name : str, optional
            Name tag. The default is ``"custom"``.
        N : int, optional
            Branching of the circle map the filter is validated for.
            The default is ``2``.
        grid : int, optional
            Validation grid size. The default is ``4096``.
        tol : float, optional
            Validation tolerance. The default is ``1e-9``.

        Raises
        ------
        ValueError
            If ``coeffs`` is empty or all zero.
        """
        self.coeffs = np.array(coeffs, dtype=complex).reshape(-1)
        if self.coeffs.shape[0] == 0 or not np.any(self.coeffs != 0):
            raise ValueError("Filter must have non zero coefficients")

        self.name = name
        self.N = int(N)
        self.residual = _qmf_residual(self, self.N, grid)
        self.is_qmf = bool(self.residual < tol)

        logger.debug(f"FilterSpec(name={name}, K={self.K}, N={self.N}, " +
                     f"residual={self.residual})")
        if not self.is_qmf:
            logger.warning(f"Filter {name} is not QMF: residual={self.residual}")

    @property
    def K(self) -> int:
        """
        Polynomial degree
        """
        return self.coeffs.shape[0] - 1

    def m0(self, t: ArrayLike) -> np.ndarray:
        """
        Evaluate ``m0`` at angle(s)
        """
        z = np.exp(2j * np.pi * np.asarray(t, dtype=float))
        return np.polyval(self.coeffs[::-1], z)

    def abs2(self, t: ArrayLike) -> np.ndarray:
        """
        Evaluate ``|m0|^2`` at angle(s)
        """
        m = self.m0(t)
        return m.real ** 2 + m.imag ** 2

    def weight(self, t: ArrayLike) -> np.ndarray:
        """
        Evaluate ``W = |m0|^2 / N`` at angle(s)
        """
        return self.abs2(t) / self.N

    def require_qmf(self, sys: SystemSpec):
        """
        Refuse non QMF filters and branching mismatch

        Raises
        ------
        solharm.errors.NonQMFError
            If the filter failed validation.
        ValueError
            If the filter was validated for different ``N``.
        """
        if not self.is_qmf:
            raise NonQMFError(f"Filter {self.name} is not QMF " +
                              f"(residual={self.residual})")
        if sys.is_circle and sys.N != self.N:
            raise ValueError(f"Filter {self.name} is validated for N={self.N}, " +
                             f"but system has N={sys.N}")

    def autocorrelation(self) -> np.ndarray:
        """
        Coefficients ``r_d`` of ``|m0|^2`` for ``d = -K, ..., K``

        Notes
        -----
        For QMF filters ``r_{qN}`` is set to ``delta_{q0}``, so that
        the transfer operator preserves constants exactly.
        """
        r = np.convolve(self.coeffs, np.conj(self.coeffs[::-1]))
        if self.is_qmf:
            d = np.arange(-self.K, self.K + 1)
            r[d % self.N == 0] = 0
            r[self.K] = 1
        return r

    def __repr__(self) -> str:
        return f"<FilterSpec(name={self.name}, K={self.K}, N={self.N}, qmf={self.is_qmf})>"

    @classmethod
    def from_config(cls, cfg: Mapping, N: int = 2) -> FilterSpec:
        """
        Create from ``{"name": "haar"}`` or
        ``{"coeffs_re": [...], "coeffs_im": [...]}``

        Raises
        ------
        solharm.errors.ConfigError
            If neither name nor coefficients are valid.
        """
        if "name" in cfg and "coeffs_re" not in cfg:
            try:
                return bundled_filter(cfg["name"], N)
            except ValueError as e:
                raise ConfigError("filter.name", str(e))

        if "coeffs_re" not in cfg:
            raise ConfigError("filter", "requires `name` or `coeffs_re`")
        re = np.asarray(cfg["coeffs_re"], dtype=float)
        im = np.asarray(cfg.get("coeffs_im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ConfigError("filter.coeffs_im",
                              f"shape {im.shape} doesn't match coeffs_re {re.shape}")
        return cls(re + 1j * im, cfg.get("name", "custom"), N=N)


def bundled_filter(name: str, N: int = 2) -> FilterSpec:
    """
    Bundled filter

    Parameters
    ----------
    name : {"haar", "constant", "d4"}
        Filter name. ``"haar"`` is the N-box filter ``N^{-1/2} sum_{k<N} z^k``.
        ``"d4"`` is the Daubechies 4-tap filter (``N = 2`` only).
    N : int, optional
        Branching. The default is ``2``.

    Returns
    -------
    solharm.filter.FilterSpec
        Validated filter

    Raises
    ------
    ValueError
        If ``name`` is unknown or unavailable for ``N``.
    """
    if name == "haar":
        return FilterSpec(np.full(N, 1 / np.sqrt(N)), "haar", N=N)
    if name == "constant":
        return FilterSpec([1.0], "constant", N=N)
    if name == "d4":
        if N != 2:
            raise ValueError(f"d4 filter requires N=2, but {N}")
        s3 = np.sqrt(3)
        h = np.array([1 + s3, 3 + s3, 3 - s3, 1 - s3]) / (4 * np.sqrt(2))
        return FilterSpec(h, "d4", N=2)
    raise ValueError(f"Unknown filter {name!r}")


def _check_n(f: FilterSpec, sys: SystemSpec):
    if sys.is_circle and sys.N != f.N:
        raise ValueError(f"Filter {f.name} is validated for N={f.N}, " +
                         f"but system has N={sys.N}")


def eval_w(f: Optional[FilterSpec], sys: SystemSpec, x: Point) -> ArrayLike:
    """
    Transition weight ``W(x) = |m0(x)|^2 / N``

    Parameters
    ----------
    f : solharm.filter.FilterSpec
        QMF filter. Ignored (may be ``None``) for tree systems.
    sys : solharm.dynsys.SystemSpec
        System
    x : float, numpy.ndarray or label
        Point(s)

    Returns
    -------
    float or numpy.ndarray
        Weight. Tree systems return the declared node weight.

    Raises
    ------
    solharm.errors.NonQMFError
        If ``f`` is not QMF.
    """
    if not sys.is_circle:
        return sys.source.weight(x)  # type: ignore
    if f is None:
        raise ValueError("Circle system requires filter")
    f.require_qmf(sys)
    w = f.weight(x)
    return float(w) if np.ndim(w) == 0 else w


def _qmf_residual(f: FilterSpec, N: int, grid: int) -> float:
    x = np.arange(grid) / grid
    y = (x[:, None] + np.arange(N)) / N
    return float(np.max(np.abs(np.mean(f.abs2(y), axis=-1) - 1.0)))


def qmf_residual(f: FilterSpec, sys: SystemSpec, grid: int = 4096) -> float:
    """
    Maximum QMF deviation ``|(1/N) sum_{r(y)=x} |m0(y)|^2 - 1|`` on a grid

    Parameters
    ----------
    f : solharm.filter.FilterSpec
        Filter
    sys : solharm.dynsys.SystemSpec
        Circle system
    grid : int, optional
        Number of equidistant ``x``. The default is ``4096``.

    Returns
    -------
    float
        Residual

    Raises
    ------
    ValueError
        If ``grid < 1``.
    """
    sys.require_circle("qmf_residual")
    if grid < 1:
        raise ValueError(f"`grid` must be positive, but {grid}")
    return _qmf_residual(f, sys.N, grid)


def mean_square(f: FilterSpec, sys: SystemSpec) -> float:
    """
    ``int |m0|^2 dmu``, which is 1 for QMF filters
    """
    _check_n(f, sys)
    return integrate_mu(sys, f.abs2).value.real


def filter_zeros(f: FilterSpec, tol: float = 1e-6) -> Tuple[float, ...]:
    """
    Zeros of ``m0`` on the circle

    Parameters
    ----------
    f : solharm.filter.FilterSpec
        Filter
    tol : float, optional
        Tolerance of ``| |z| - 1 |`` for polynomial roots. Multiple roots
        are only accurate to the square root of machine precision.
        The default is ``1e-6``.

    Returns
    -------
    tuple of floats
        Sorted distinct angles
    """
    if f.K == 0:
        return tuple()
    z = np.roots(f.coeffs[::-1])
    z = z[np.abs(np.abs(z) - 1.0) < tol]
    t = np.sort(reduce_angle(np.angle(z) / (2 * np.pi)).reshape(-1))

    zeros: List[float] = []
    for ti in t:
        if not zeros or (ti - zeros[-1]) > tol:
            zeros.append(float(ti))
    if len(zeros) > 1 and (zeros[0] + 1.0 - zeros[-1]) <= tol:
        zeros.pop()
    return tuple(zeros)


def _transfer_coeffs(f: FilterSpec, g: np.ndarray) -> np.ndarray:
    N = f.N
    D = g.shape[0] // 2
    Q = (f.K + D) // N
    full = np.convolve(f.autocorrelation(), g)
    return full[np.arange(-Q, Q + 1) * N + f.K + D]


def transfer_apply(f: FilterSpec,
                   sys: SystemSpec,
                   g: Union[TrigPoly, CircleFunction],
                   *,
                   max_degree: Optional[int] = None) -> Union[TrigPoly, CircleFunction]:
    """
    Apply the transfer operator ``R_W g(x) = sum_{r(y)=x} W(y) g(y)``

    Parameters
    ----------
    f : solharm.filter.FilterSpec
        QMF filter
    sys : solharm.dynsys.SystemSpec
        Circle system
    g : solharm.filter.TrigPoly or callable
        Input. ``TrigPoly`` selects coefficient mode, callable selects grid
        mode (pointwise evaluation).
    max_degree : int, optional
        Degree truncation of coefficient mode. If ``None`` (default),
        no truncation is applied.

    Returns
    -------
    solharm.filter.TrigPoly or callable
        ``R_W g``. In coefficient mode the output has degree
        ``(D + K) // N``.

    Raises
    ------
    solharm.errors.NonQMFError
        If ``f`` is not QMF.
    solharm.errors.TruncationError
        If the output degree exceeds ``max_degree``.
    """
    sys.require_circle("transfer_apply")
    f.require_qmf(sys)

    if isinstance(g, TrigPoly):
        out = TrigPoly(_transfer_coeffs(f, g.coeffs))
        if (max_degree is not None) and (out.degree > max_degree):
            raise TruncationError(f"R_W output requires truncation degree {out.degree}, " +
                                  f"but {max_degree}")
        return out

    def Rg(x: ArrayLike) -> np.ndarray:
        y = preimage_grid(sys, x)
        return np.sum(f.weight(y) * g(y), axis=-1)
    return Rg


def _required_degree(f: FilterSpec) -> int:
    D = 0
    while (f.K + D) // f.N > D:
        D += 1
    return D


def transfer_matrix(f: FilterSpec, sys: SystemSpec, degree: int) -> np.ndarray:
    """
    Dense matrix of ``R_W`` on degree ``D`` polynomials

    Parameters
    ----------
    f : solharm.filter.FilterSpec
        QMF filter
    sys : solharm.dynsys.SystemSpec
        Circle system
    degree : int
        Truncation degree ``D``

    Returns
    -------
    numpy.ndarray
        ``(2D+1, 2D+1)`` complex matrix acting on ascending coefficients

    Raises
    ------
    solharm.errors.TruncationError
        If ``R_W`` doesn't map degree ``D`` into itself.
    """
    sys.require_circle("transfer_matrix")
    f.require_qmf(sys)
    if degree < 0:
        raise ValueError(f"`degree` must be non negative, but {degree}")
    if (f.K + degree) // f.N > degree:
        raise TruncationError(f"R_W of filter {f.name} requires truncation degree " +
                              f"at least {_required_degree(f)}, but {degree}")

    r = f.autocorrelation()
    q = np.arange(-degree, degree + 1)
    d = q[:, None] * f.N - q[None, :]
    inside = np.abs(d) <= f.K
    M = np.zeros(d.shape, dtype=complex)
    M[inside] = r[d[inside] + f.K]
    return M


def rw_harmonic_solve(f: FilterSpec, sys: SystemSpec, degree: int) -> List[TrigPoly]:
    """
    Basis of ``R_W``-harmonic trigonometric polynomials

    Parameters
    ----------
    f : solharm.filter.FilterSpec
        QMF filter
    sys : solharm.dynsys.SystemSpec
        Circle system
    degree : int
        Truncation degree ``D``

    Returns
    -------
    list of solharm.filter.TrigPoly
        Orthonormal (in coefficients) basis of the eigenvalue 1 space.
        Each vector's largest coefficient is made real positive.

    Raises
    ------
    solharm.errors.NonQMFError
        If ``f`` is not QMF.
    solharm.errors.TruncationError
        If ``degree`` is too small for the filter.
    """
    M = transfer_matrix(f, sys, degree)
    vals, vecs = scipy.linalg.eig(M)
    fixed = np.abs(vals - 1.0) < EIGEN_TOL
    logger.debug(f"rw_harmonic_solve: {np.count_nonzero(fixed)} fixed of {vals.shape[0]}")
    if not np.any(fixed):
        return []

    basis = scipy.linalg.orth(vecs[:, fixed])
    out = []
    for v in basis.T:
        k = np.argmax(np.abs(v))
        v = v * (np.abs(v[k]) / v[k])
        out.append(TrigPoly(v))
    return out


@dataclass(frozen=True)
class LyapunovReport:
    """
    Lyapunov integral ``a = int log|m0|^2 dmu``

    Attributes
    ----------
    value : float
        ``a``
    error : float
        Quadrature error estimate
    jensen : bool
        Whether Jensen bound ``a <= 0`` holds within ``error``
    """
    value: float
    error: float
    jensen: bool


def lyapunov(f: FilterSpec, sys: SystemSpec, *, divergence_tol: float = 1e-6) -> LyapunovReport:
    """
    Lyapunov integral ``a = int log|m0|^2 dmu``

    Parameters
    ----------
    f : solharm.filter.FilterSpec
        Filter
    sys : solharm.dynsys.SystemSpec
        Circle system
    divergence_tol : float, optional
        Largest accepted refinement difference. The default is ``1e-6``.

    Returns
    -------
    solharm.filter.LyapunovReport
        Value and Jensen bound check

    Raises
    ------
    solharm.errors.SolharmError
        If the refinement doesn't converge.

    Notes
    -----
    Zeros of ``m0`` are passed to the quadrature as breakpoints.
    A single non zero coefficient gives constant ``|m0|`` and
    the exact value ``log|h_k|^2``.
    """
    sys.require_circle("lyapunov")
    _check_n(f, sys)

    nz = np.flatnonzero(f.coeffs)
    if nz.shape[0] == 1:
        a = 2.0 * float(np.log(np.abs(f.coeffs[nz[0]])))
        return LyapunovReport(a, 0.0, a <= 0.0)

    def log_abs2(t):
        with np.errstate(divide="ignore"):
            return np.log(f.abs2(t))

    q = integrate_mu(sys, log_abs2, breakpoints=filter_zeros(f))
    if q.error > divergence_tol:
        raise TruncationError(f"Lyapunov quadrature diverges: refinement difference {q.error}")

    a = q.value.real
    logger.debug(f"lyapunov({f.name}) = {a} +- {q.error}")
    return LyapunovReport(a, q.error, a <= q.error)


def cocycle_from_coords(f: FilterSpec,
                        forward: ArrayLike,
                        backward: ArrayLike,
                        n: int) -> np.ndarray:
    """
    Squared cocycle modulus from solenoid coordinates

    Parameters
    ----------
    f : solharm.filter.FilterSpec
        Filter
    forward : numpy.ndarray
        ``(..., F)`` coordinates ``x0, r(x0), ..., r^{F-1}(x0)``
    backward : numpy.ndarray
        ``(..., L)`` coordinates ``x1, ..., xL``
    n : int
        Cocycle index

    Returns
    -------
    numpy.ndarray
        ``|m~_n|^2``; product of ``|m0|^2`` over ``forward[..., :n]``
        for ``n >= 1``, reciprocal product over ``backward[..., :|n|]``
        for ``n <= -1``, and 1 for ``n = 0``.

    Raises
    ------
    solharm.errors.TruncationError
        If coordinates are insufficient.
    solharm.errors.FilterZeroError
        If a factor vanishes.
    """
    forward = np.asarray(forward, dtype=float)
    backward = np.asarray(backward, dtype=float)
    if n == 0:
        return np.ones(forward.shape[:-1])

    coords = forward if n > 0 else backward
    k = abs(n)
    if coords.shape[-1] < k:
        kind = "forward" if n > 0 else "backward"
        raise TruncationError(f"insufficient {kind} coordinates: " +
                              f"|n|={k}, but {coords.shape[-1]}")

    a2 = f.abs2(coords[..., :k])
    zero = a2 < ZERO_TOL ** 2
    if np.any(zero):
        t = coords[..., :k][zero][0]
        raise FilterZeroError(f"cocycle undefined (filter zero on orbit at t={t!r})")

    p = np.prod(a2, axis=-1)
    return p if n > 0 else 1.0 / p


def cocycle_mod2(f: FilterSpec, prefix, n: int) -> float:
    """
    Squared cocycle modulus ``|m~_n(z)|^2`` of a path prefix

    Parameters
    ----------
    f : solharm.filter.FilterSpec
        Filter
    prefix : solharm.boundary.PathPrefix
        Prefix ``(x0, ..., xL)`` of a circle system
    n : int
        Cocycle index. Forward factors are computed from ``x0``.

    Returns
    -------
    float
        ``|m~_n(z)|^2``

    Raises
    ------
    solharm.errors.TruncationError
        If ``n < -L`` (insufficient backward coordinates).
    solharm.errors.FilterZeroError
        If a factor vanishes.
    """
    points = np.asarray(prefix.points, dtype=float)
    forward = np.empty(max(n, 0))
    x = points[0]
    for k in range(forward.shape[0]):
        forward[k] = x
        x = reduce_angle(f.N * x)
    return float(cocycle_from_coords(f, forward, points[1:], n))
