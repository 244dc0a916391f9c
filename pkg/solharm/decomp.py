"""
Decomposition Module (:mod:`solharm.decomp`)
=============================================

Computable content of the direct integral decomposition of the wavelet
representation over the orbits of ``r_inf``;

* fiber spaces ``H_z`` with ``<xi, eta> = sum_n xi_n conj(eta_n) |m~_n(z)|^2``
  and the operators ``U_z``, ``pi_z`` at finite index ranges
* Birkhoff sums of ``log|m0|^2`` along exact forward orbits
* visit probabilities ``P(theta_m z in A0)``, their decay and an audit of
  the threshold ``|m~_m|^2 <= b^m`` on ``A0``
* shift indices ``k_z`` of sampled solenoid points with respect to
  ``A_inf = {z : z_0, z_1, ... in B0}`` and the truncated isometry check
  of the decomposition


Examples
--------
>>> from solharm import dynsys, filter, decomp
>>> sys = dynsys.SystemSpec("circle", N=2)
>>> haar = filter.bundled_filter("haar")
>>> A0 = dynsys.ArcSet([(0.4, 0.6)])
>>> p = [decomp.visit_probability(sys, haar, A0, m) for m in range(1, 11)]
>>> fit = decomp.fit_decay_rate(range(3, 11), p[2:])
>>> fit.b < 0.95
True
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import wblog

from .dynsys import (
    POINT_TOL, ArcSet, Expansion, SystemSpec, integrate_mu, reduce_angle
)
from .errors import FilterZeroError, SolharmError, TruncationError
from .filter import ZERO_TOL, FilterSpec, filter_zeros
from .soltyping import CircleFunction
from .solenoid import (
    MCEstimate, SolenoidBatch, SolenoidFunction, SolenoidSample,
    _estimate, forward_product, mc_values, sample_cocycle_mod2,
    sample_mu_inf_batch
)

__all__ = [
    "FiberVector",
    "fiber_inner",
    "fiber_norm",
    "fiber_U",
    "fiber_U_inv",
    "fiber_pi",
    "PeriodReport",
    "non_periodic",
    "birkhoff_sum",
    "visit_probability",
    "DecayFit",
    "fit_decay_rate",
    "AuditReport",
    "audit_threshold",
    "ShiftHistogram",
    "domain_shift_stat",
    "shift_classes",
    "PsiReport",
    "psi_isometry_check",
]

logger = wblog.getLogger()

MAX_PANELS = 65536
UNDECIDED = np.iinfo(np.int64).max
BELOW = np.iinfo(np.int64).min


class FiberVector:
    """
    Vector of the fiber space ``H_z`` on the index range ``[lo, hi]``

    Notes
    -----
    ``[lo, hi]`` must lie in ``[-L, F]`` of the base point.
    Operations never zero pad; leaving the range raises ``TruncationError``.
    """
    def __init__(self, z: SolenoidSample, filter: FilterSpec,
                 entries: Iterable[complex], lo: int):
        """
        Initialize FiberVector

        Parameters
        ----------
        z : solharm.solenoid.SolenoidSample
            Base point
        filter : solharm.filter.FilterSpec
            Filter
        entries : iterable of complex
            ``xi_lo, ..., xi_hi``
        lo : int
            First index

        Raises
        ------
        solharm.errors.TruncationError
            If the range exceeds ``[-L, F]``.
        solharm.errors.FilterZeroError
            If a cocycle factor vanishes (measure zero base point).
        """
        self.z = z
        self.filter = filter
        self.entries = np.array(entries, dtype=complex).reshape(-1)
        self.entries.setflags(write=False)
        self.lo = int(lo)
        if self.entries.shape[0] == 0:
            raise TruncationError(f"empty fiber index range starting at {lo}")
        if self.lo < -z.length or self.hi > z.forward_budget:
            raise TruncationError(f"fiber index range [{self.lo}, {self.hi}] exceeds " +
                                  f"[-{z.length}, {z.forward_budget}]")
        self.weights = _cocycle_range(filter, z, self.lo, self.hi)

    @property
    def hi(self) -> int:
        return self.lo + self.entries.shape[0] - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def __getitem__(self, n: int) -> complex:
        if not (self.lo <= n <= self.hi):
            raise TruncationError(f"index {n} outside [{self.lo}, {self.hi}]")
        return complex(self.entries[n - self.lo])

    @classmethod
    def delta(cls, z: SolenoidSample, filter: FilterSpec, k: int,
              lo: int, hi: int) -> FiberVector:
        """
        Unit vector ``delta_k`` on ``[lo, hi]``
        """
        e = np.zeros(hi - lo + 1, dtype=complex)
        if not (lo <= k <= hi):
            raise TruncationError(f"index {k} outside [{lo}, {hi}]")
        e[k - lo] = 1.0
        return cls(z, filter, e, lo)

    def restrict(self, lo: int, hi: int) -> FiberVector:
        if lo < self.lo or hi > self.hi:
            raise TruncationError(f"[{lo}, {hi}] is not inside [{self.lo}, {self.hi}]")
        return FiberVector(self.z, self.filter,
                           self.entries[lo - self.lo:hi - self.lo + 1], lo)

    def __repr__(self) -> str:
        return f"<FiberVector(range=[{self.lo}, {self.hi}])>"


def _theta0_shift(z: SolenoidSample, n: np.ndarray) -> np.ndarray:
    # theta_0(r_inf^n z) = window[origin - n]
    return z.window[z.origin - n]


def _cocycle_range(f: FilterSpec, z: SolenoidSample, lo: int, hi: int) -> np.ndarray:
    n = np.arange(lo, hi + 1)
    w = np.ones(n.shape)
    if hi > 0:
        t = z.forward_coords()[:hi]
        c = np.cumprod(_nonzero_abs2(f, t))
        pos = n > 0
        w[pos] = c[n[pos] - 1]
    if lo < 0:
        t = z.backward_coords()[:-lo]
        c = np.cumprod(_nonzero_abs2(f, t))
        neg = n < 0
        w[neg] = 1.0 / c[-n[neg] - 1]
    return w


def _nonzero_abs2(f: FilterSpec, t: np.ndarray) -> np.ndarray:
    a2 = f.abs2(t)
    zero = np.flatnonzero(a2 < ZERO_TOL ** 2)
    if zero.shape[0] > 0:
        raise FilterZeroError("sample in the excluded null set: filter zero at " +
                              f"t={t[zero[0]]!r}")
    return a2


def _same_base(v: FiberVector, w: FiberVector):
    if (v.z.origin != w.z.origin) or not np.array_equal(v.z.window, w.z.window):
        raise SolharmError("Fiber vectors have different base points")
    if (v.lo, v.hi) != (w.lo, w.hi):
        raise SolharmError(f"Fiber index ranges differ: [{v.lo}, {v.hi}], [{w.lo}, {w.hi}]")


def fiber_inner(v: FiberVector, w: FiberVector) -> complex:
    """
    ``<v, w> = sum_n v_n conj(w_n) |m~_n(z)|^2``

    Raises
    ------
    solharm.errors.SolharmError
        If base points or ranges differ.
    """
    _same_base(v, w)
    return complex(np.sum(v.entries * np.conj(w.entries) * v.weights))


def fiber_norm(v: FiberVector) -> float:
    return float(np.sqrt(fiber_inner(v, v).real))


def fiber_U(v: FiberVector) -> FiberVector:
    """
    ``(U_z xi)_n = m0(theta_0 r_inf^n z) xi_{n+1}`` on ``[lo, hi - 1]``

    Raises
    ------
    solharm.errors.TruncationError
        If the output range is empty.
    """
    if v.hi - 1 < v.lo:
        raise TruncationError(f"U_z requires index {v.hi + 1}, range is [{v.lo}, {v.hi}]")
    n = np.arange(v.lo, v.hi)
    m = v.filter.m0(_theta0_shift(v.z, n))
    return FiberVector(v.z, v.filter, m * v.entries[1:], v.lo)


def fiber_U_inv(v: FiberVector) -> FiberVector:
    """
    ``(U_z^-1 xi)_n = xi_{n-1} / m0(theta_0 r_inf^{n-1} z)`` on ``[lo + 1, hi]``

    Raises
    ------
    solharm.errors.TruncationError
        If the output range is empty.
    """
    if v.hi - 1 < v.lo:
        raise TruncationError(f"U_z^-1 requires index {v.lo - 1}, range is [{v.lo}, {v.hi}]")
    n = np.arange(v.lo, v.hi)
    m = v.filter.m0(_theta0_shift(v.z, n))
    return FiberVector(v.z, v.filter, v.entries[:-1] / m, v.lo + 1)


def fiber_pi(f: CircleFunction, v: FiberVector) -> FiberVector:
    """
    ``(pi_z(f) xi)_n = f(theta_0 r_inf^n z) xi_n``
    """
    return FiberVector(v.z, v.filter, f(_theta0_shift(v.z, v.indices)) * v.entries, v.lo)


@dataclass(frozen=True)
class PeriodReport:
    """
    Periodicity of a solenoid point within its window

    Attributes
    ----------
    non_periodic : bool
        Whether ``r_inf^n z != z`` for every testable ``n``
    period : int, optional
        Smallest ``n`` with matching coordinates
    horizon : int
        Largest tested ``n``
    """
    non_periodic: bool
    period: Optional[int]
    horizon: int


def non_periodic(z: SolenoidSample, tol: float = POINT_TOL,
                 min_overlap: int = 8) -> PeriodReport:
    """
    Check ``r_inf^n z != z`` on the window

    Parameters
    ----------
    z : solharm.solenoid.SolenoidSample
        Base point
    tol : float, optional
        Point tolerance. The default is ``1e-12``.
    min_overlap : int, optional
        Minimum number of overlapping coordinates for a shift to be
        testable. The default is ``8``.

    Returns
    -------
    solharm.decomp.PeriodReport
        Report up to the truncation horizon
    """
    w = z.window
    horizon = max(w.shape[0] - min_overlap, 0)
    for n in range(1, horizon + 1):
        d = np.abs(w[n:] - w[:-n]) % 1.0
        if np.all(np.minimum(d, 1.0 - d) <= tol):
            return PeriodReport(False, n, horizon)
    return PeriodReport(True, None, horizon)


def _precision(N: int) -> int:
    return int(np.ceil(53 / np.log2(N))) + 2


def birkhoff_sum(sys: SystemSpec, filter: FilterSpec,
                 x0: Union[float, Expansion], n: int) -> float:
    """
    Birkhoff average ``(1/n) sum_{k<n} log|m0(r^k(x0))|^2``

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    filter : solharm.filter.FilterSpec
        Filter
    x0 : float or solharm.dynsys.Expansion
        Start point. A float is expanded exactly, so that its orbit is
        the exact orbit of the rational number it represents.
    n : int
        Number of terms

    Returns
    -------
    float
        Birkhoff average

    Raises
    ------
    solharm.errors.FilterZeroError
        If an orbit point is within ``1e-14`` of a filter zero.
    """
    sys.require_circle("birkhoff_sum")
    if n < 1:
        raise ValueError(f"`n` must be positive, but {n}")
    if not isinstance(x0, Expansion):
        x0 = Expansion.from_float(float(x0), sys.N, n - 1 + _precision(sys.N))
    orbit = x0.orbit(n)

    for t0 in filter_zeros(filter):
        d = np.abs(orbit - t0) % 1.0
        hit = np.flatnonzero(np.minimum(d, 1.0 - d) < ZERO_TOL)
        if hit.shape[0] > 0:
            k = int(hit[0])
            raise FilterZeroError(f"r^{k}(x0) = {orbit[k]!r} hits filter zero {t0!r}")

    with np.errstate(divide="ignore"):
        v = np.log(filter.abs2(orbit))
    if not np.all(np.isfinite(v)):
        k = int(np.flatnonzero(~np.isfinite(v))[0])
        raise FilterZeroError(f"r^{k}(x0) = {orbit[k]!r} hits filter zero")
    return float(np.sum(v) / n)


def visit_probability(sys: SystemSpec, filter: FilterSpec, A0: ArcSet, m: int, *,
                      tol: float = 1e-10, max_panels: int = MAX_PANELS) -> float:
    """
    Visit probability ``P(theta_m z in A0) = int |m~_m(x)|^2 chi_A0(x) dmu(x)``

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    filter : solharm.filter.FilterSpec
        QMF filter
    A0 : solharm.dynsys.ArcSet
        Arc union
    m : int
        Coordinate ``m >= 1``
    tol : float, optional
        Target refinement difference. The default is ``1e-10``.
    max_panels : int, optional
        Panel cap of automatic refinement. The default is ``65536``.

    Returns
    -------
    float
        Probability

    Raises
    ------
    solharm.errors.TruncationError
        If the panel cap is reached before ``tol``.
    """
    sys.require_circle("visit_probability")
    filter.require_qmf(sys)
    if m < 1:
        raise ValueError(f"`m` must be positive, but {m}")

    def g(t):
        return forward_product(filter, t, m) * A0.contains(t)

    P = sys.panels
    while True:
        q = integrate_mu(sys, g, panels=P, breakpoints=A0.edges)
        if q.error <= tol:
            return q.value.real
        if 2 * P > max_panels:
            raise TruncationError(f"visit_probability(m={m}) didn't converge with " +
                                  f"{P} panels: difference {q.error}")
        P *= 2
        logger.debug(f"visit_probability: refine to {P} panels")


@dataclass(frozen=True)
class DecayFit:
    """
    Log-linear fit ``p_m ~ C b^m``

    Attributes
    ----------
    b : float
        Fitted rate
    C : float
        Fitted constant
    slope : float
        ``log b``
    """
    b: float
    C: float
    slope: float


def fit_decay_rate(ms: Iterable[int], probs: Iterable[float]) -> DecayFit:
    """
    Fit ``log p_m = log C + m log b`` by least squares

    Raises
    ------
    ValueError
        If fewer than 2 points or a non positive probability is given.
    """
    m = np.asarray(list(ms), dtype=float)
    p = np.asarray(list(probs), dtype=float)
    if m.shape != p.shape or m.shape[0] < 2:
        raise ValueError(f"Need at least 2 matching points, but {m.shape}, {p.shape}")
    if np.any(p <= 0):
        raise ValueError("Probabilities must be positive for log-linear fit")
    slope, intercept = np.polyfit(m, np.log(p), 1)
    return DecayFit(float(np.exp(slope)), float(np.exp(intercept)), float(slope))


@dataclass(frozen=True)
class AuditReport:
    """
    Threshold audit of ``|m~_m|^2 <= b^m`` for ``n0 <= m <= m_max`` on ``A0``

    Attributes
    ----------
    violations : int
        Grid points of ``A0`` violating the bound for some ``m``
    total : int
        Grid points in ``A0``
    fraction : float
        ``violations / total``
    """
    violations: int
    total: int
    fraction: float


def audit_threshold(sys: SystemSpec, filter: FilterSpec, A0: ArcSet,
                    n0: int, b: float, m_max: int, grid: int = 4096) -> AuditReport:
    """
    Audit the threshold structure of ``A0``

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    filter : solharm.filter.FilterSpec
        Filter
    A0 : solharm.dynsys.ArcSet
        Arc union
    n0 : int
        First audited ``m``
    b : float
        Rate, ``exp(a) < b < 1``
    m_max : int
        Last audited ``m``
    grid : int, optional
        Grid size. The default is ``4096``.

    Returns
    -------
    solharm.decomp.AuditReport
        Violations on grid midpoints
    """
    sys.require_circle("audit_threshold")
    if not (1 <= n0 <= m_max):
        raise ValueError(f"Need 1 <= n0 <= m_max, but n0={n0}, m_max={m_max}")
    x = (np.arange(grid) + 0.5) / grid
    x = x[A0.contains(x)]
    bad = np.zeros(x.shape[0], dtype=bool)
    p = forward_product(filter, x, n0 - 1) if n0 > 1 else np.ones(x.shape)
    y = x
    for _ in range(n0 - 1):
        y = reduce_angle(sys.N * y)
    for m in range(n0, m_max + 1):
        p = p * filter.abs2(y)
        y = reduce_angle(sys.N * y)
        bad |= p > b ** m
    total = x.shape[0]
    v = int(np.count_nonzero(bad))
    return AuditReport(v, total, v / total if total else 0.0)


@dataclass(frozen=True)
class ShiftHistogram:
    """
    Histogram of smallest ``k`` with ``x_k, ..., x_L in B0``

    Attributes
    ----------
    counts : numpy.ndarray
        ``counts[k]`` for ``k = 0, ..., L``
    undecided : float
        Fraction with ``x_L`` outside ``B0``
    n : int
        Number of samples
    """
    counts: np.ndarray
    undecided: float
    n: int

    def to_dict(self) -> dict:
        return {"counts": [int(c) for c in self.counts],
                "undecided": self.undecided,
                "samples": self.n}


def _run_start(inB: np.ndarray) -> np.ndarray:
    # smallest k with inB[..., k:] all True, UNDECIDED if the last is False
    L = inB.shape[-1] - 1
    out_ = ~inB
    any_out = np.any(out_, axis=-1)
    last = L - np.argmax(out_[..., ::-1], axis=-1)
    k = np.where(any_out, last + 1, 0)
    return np.where(inB[..., -1], k, UNDECIDED)


def domain_shift_stat(sys: SystemSpec, filter: FilterSpec, B0: ArcSet,
                      samples: int, length: int, seed: Optional[int]) -> ShiftHistogram:
    """
    Empirical membership index of sampled solenoid prefixes

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    filter : solharm.filter.FilterSpec
        QMF filter
    B0 : solharm.dynsys.ArcSet
        Complement of the threshold set ``A0``
    samples : int
        Number of samples
    length : int
        Prefix length ``L``
    seed : int
        Random seed

    Returns
    -------
    solharm.decomp.ShiftHistogram
        Histogram and undecided fraction
    """
    Z = sample_mu_inf_batch(sys, filter, samples, length=length, forward=0, seed=seed)
    k = _run_start(B0.contains(Z.window))
    decided = k != UNDECIDED
    counts = np.bincount(k[decided], minlength=length + 1)
    return ShiftHistogram(counts, float(np.count_nonzero(~decided) / samples), samples)


def shift_classes(Z: SolenoidBatch, B0: ArcSet) -> np.ndarray:
    """
    Membership index ``k_z`` including forward coordinates

    Parameters
    ----------
    Z : solharm.solenoid.SolenoidBatch
        Samples
    B0 : solharm.dynsys.ArcSet
        Complement of ``A0``

    Returns
    -------
    numpy.ndarray
        Smallest ``k >= -F`` with ``z_k, z_{k+1}, ..., z_L in B0``
        (``z_{-j} = r^j(z_0)``), such that ``z`` belongs to
        ``r_inf^{k-1}(F)`` for the fundamental domain
        ``F = r_inf(A_inf) \\ A_inf``. ``UNDECIDED`` if ``z_L`` is outside
        ``B0``, ``BELOW`` if the whole window is inside ``B0``.
    """
    inB = B0.contains(Z.window)
    k = _run_start(inB)
    k = np.where(k == UNDECIDED, UNDECIDED,
                 np.where(np.all(inB, axis=-1), BELOW, k - Z.origin))
    return k


@dataclass(frozen=True)
class PsiReport:
    """
    Truncated isometry check of the decomposition

    Attributes
    ----------
    lhs : solharm.solenoid.MCEstimate
        ``E[|xi|^2 ; k_z - 1 in range]``
    rhs : solharm.solenoid.MCEstimate
        ``sum_n E[|m~_n|^2 |xi o r_inf^n|^2 ; z in F]``
    diff : solharm.solenoid.MCEstimate
        Paired difference
    undecided : float
        Fraction of undecided samples
    passed : bool
        ``|diff.mean| <= 4 diff.stderr``
    """
    lhs: MCEstimate
    rhs: MCEstimate
    diff: MCEstimate
    undecided: float
    passed: bool


def psi_isometry_check(sys: SystemSpec, filter: FilterSpec, xi: SolenoidFunction,
                       B0: ArcSet, n_range: Sequence[int], samples: int,
                       seed: Optional[int], *, length: int = 32,
                       forward: int = 8, k: float = 4.0) -> PsiReport:
    """
    Check ``||xi||^2 = sum_n ||xi||^2 on r_inf^n(F)`` at finite range

    Parameters
    ----------
    sys : solharm.dynsys.SystemSpec
        Circle system
    filter : solharm.filter.FilterSpec
        QMF filter
    xi : solharm.solenoid.SolenoidFunction
        Bounded cylinder function
    B0 : solharm.dynsys.ArcSet
        Complement of ``A0``
    n_range : sequence of ints
        Translates ``n`` of the fundamental domain
    samples : int
        Number of samples
    seed : int
        Random seed
    length, forward : int, optional
        Window of samples. The defaults are ``32`` and ``8``.
    k : float, optional
        Gate in standard errors. The default is ``4.0``.

    Returns
    -------
    solharm.decomp.PsiReport
        Paired Monte Carlo comparison

    Notes
    -----
    Both sides are equal in expectation by the isometry of ``U``
    applied to ``|xi|^2 chi_{r_inf^n(F)}``.
    """
    ns = np.asarray(list(n_range), dtype=np.int64)
    if ns.shape[0] == 0:
        raise ValueError("`n_range` must not be empty")
    if ns.min() < -length or ns.max() > forward:
        raise TruncationError(f"n range [{ns.min()}, {ns.max()}] exceeds window " +
                              f"[-{length}, {forward}]")
    undecided = []

    def integrand(Z: SolenoidBatch) -> np.ndarray:
        kz = shift_classes(Z, B0)
        undecided.append(np.count_nonzero(kz == UNDECIDED))
        lhs = np.abs(xi(Z)) ** 2 * np.isin(kz, ns + 1)
        inF = kz == 1
        rhs = np.zeros(len(Z))
        if np.any(inF):
            sub = SolenoidBatch(sys, Z.window[inF], Z.origin)
            for n in ns:
                y = sub.shift(int(n))
                w = sample_cocycle_mod2(filter, sub, int(n))
                rhs[inF] += w * np.abs(xi(y)) ** 2
        return lhs + 1j * rhs

    v = mc_values(sys, filter, integrand, samples, seed, length=length, forward=forward)
    lhs, rhs = _estimate(v.real), _estimate(v.imag)
    diff = _estimate(v.real - v.imag)
    passed = bool(abs(diff.mean) <= k * diff.stderr)
    logger.debug(f"psi_isometry_check: lhs={lhs.mean}, rhs={rhs.mean}, pass={passed}")
    return PsiReport(lhs, rhs, diff, float(sum(undecided)) / samples, passed)

