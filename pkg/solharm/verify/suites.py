"""
Verification Suites Module (:mod:`solharm.verify.suites`)
=========================================================

Invariant suites of every module at desk scale.
Monte Carlo checks use fixed per-check seeds derived from the suite seed,
and 4 or 5 standard error gates.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Dict, Iterable, List

import numpy as np
import scipy.stats
import wblog

from solharm import boundary, decomp, dynsys, harmonic, solenoid, tree
from solharm import filter as filt
from solharm.dynsys import ArcSet, SystemSpec
from solharm.errors import RegularityError
from solharm.filter import FilterSpec, TrigPoly
from solharm.random import PCG64

from .core import AtLeast, Bound, CheckResult, Flag, Suite

__all__ = [
    "SUITES",
    "REGULAR_ROOTS",
    "dynsys_suite",
    "filter_suite",
    "tree_suite",
    "boundary_suite",
    "harmonic_suite",
    "solenoid_suite",
    "decomp_suite",
    "build_suites",
    "run_suites",
]

logger = wblog.getLogger()

REGULAR_ROOTS = (0.1234477851, 0.3141592653, 0.7071067811)
MC_SAMPLES = 100000
SIGMA = 4.0
BINOMIAL_SIGMA = 5.0


def _zscore(est: solenoid.MCEstimate, value: complex = 0.0) -> float:
    return float(abs(est.mean - value) / max(est.stderr, 1e-300))


def _binomial_z(count: float, n: int, p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0 if count == n * p else np.inf
    return float(abs(count - n * p) / np.sqrt(n * p * (1 - p)))


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def _haar(sys: SystemSpec) -> FilterSpec:
    return filt.bundled_filter("haar", sys.N)


def _expi(k: int) -> Callable[[np.ndarray], np.ndarray]:
    return lambda t: np.exp(2j * np.pi * k * np.asarray(t))


def dynsys_suite(sys: SystemSpec, f: FilterSpec, seed: int) -> Suite:
    s = Suite("dynsys")

    def preimage_third():
        ys = dynsys.preimages(sys, 1 / 3)
        expect = [(1 / 3 + j) / sys.N for j in range(sys.N)]
        return max(abs(y - e) for y, e in zip(ys, expect))
    s.add(Bound("preimages_of_one_third", preimage_third, 1e-15))
    s.add(Bound("integrate_exp",
                lambda: abs(dynsys.integrate_mu(sys, _expi(1)).value), 1e-12))
    s.add(Bound("integrate_cos2",
                lambda: abs(dynsys.integrate_mu(
                    sys, lambda t: np.cos(np.pi * t) ** 2).value - 0.5), 1e-12))
    s.add(Bound("strong_invariance",
                lambda: dynsys.strong_invariance_residual(
                    sys, lambda t: np.exp(np.sin(2 * np.pi * t))), 1e-12))

    def haar_mean():
        t = dynsys.sample_mu(sys, seed, MC_SAMPLES)
        return abs(np.mean(np.exp(2j * np.pi * t))) * np.sqrt(MC_SAMPLES)
    s.add(Bound("sample_mu_mean_sqrt_n", haar_mean, SIGMA))

    def quarter():
        t = dynsys.sample_mu(sys, seed + 1, MC_SAMPLES)
        return _binomial_z(np.count_nonzero(t < 0.25), MC_SAMPLES, 0.25)
    s.add(Bound("sample_mu_quarter_z", quarter, SIGMA))
    return s


def filter_suite(sys: SystemSpec, f: FilterSpec, seed: int) -> Suite:
    s = Suite("filter")
    haar = _haar(sys)
    const = filt.bundled_filter("constant", sys.N)

    s.add(Bound("qmf_residual", lambda: filt.qmf_residual(f, sys), 1e-12))
    s.add(Bound("qmf_residual_haar", lambda: filt.qmf_residual(haar, sys), 1e-12))
    if sys.N == 2:
        s.add(Bound("qmf_residual_d4",
                    lambda: filt.qmf_residual(filt.bundled_filter("d4"), sys), 1e-12))
    s.add(Bound("qmf_residual_constant", lambda: filt.qmf_residual(const, sys), 0.0))
    s.add(Bound("mean_square", lambda: abs(filt.mean_square(f, sys) - 1.0), 1e-12))

    if sys.N == 2:
        s.add(Bound("haar_weight_one_sixth",
                    lambda: abs(filt.eval_w(haar, sys, 1 / 6) - 0.75), 1e-12))

        def haar_transfer():
            t = (np.arange(512) + 0.5) / 512
            Rg = filt.transfer_apply(haar, sys, _expi(1))
            return float(np.max(np.abs(Rg(t) - (1 + np.exp(2j * np.pi * t)) / 2)))
        s.add(Bound("haar_transfer_exp", haar_transfer, 1e-12))
        s.add(Bound("cocycle_forward",
                    lambda: abs(filt.cocycle_mod2(
                        haar, boundary.PathPrefix(sys, [1 / 3]), 1) - 0.5), 1e-12))
        s.add(Bound("cocycle_backward",
                    lambda: abs(filt.cocycle_mod2(
                        haar, boundary.PathPrefix(sys, [1 / 3, 1 / 6]), -1) - 1 / 1.5),
                    1e-12))

    def dual_mode():
        rng = PCG64(seed)
        t = (np.arange(512) + 0.5) / 512
        worst = 0.0
        for _ in range(10):
            g = TrigPoly.random(4, rng)
            a = filt.transfer_apply(f, sys, g)(t)
            b = filt.transfer_apply(f, sys, lambda x: g(x))(t)
            worst = max(worst, float(np.max(np.abs(a - b))))
        return worst
    s.add(Bound("transfer_dual_mode", dual_mode, 1e-10))

    def harmonic_residual():
        t = (np.arange(1024) + 0.5) / 1024
        basis = filt.rw_harmonic_solve(f, sys, 8)
        Rh = [filt.transfer_apply(f, sys, h)(t) - h(t) for h in basis]
        return max((float(np.max(np.abs(r))) for r in Rh), default=np.inf)
    s.add(Bound("rw_harmonic_residual", harmonic_residual, 1e-9))
    s.add(Flag("rw_harmonic_haar_dim_1",
               lambda: len(filt.rw_harmonic_solve(haar, sys, 8)) == 1))

    s.add(Bound("lyapunov_haar",
                lambda: abs(filt.lyapunov(haar, sys).value + np.log(sys.N)), 1e-4))
    s.add(Bound("lyapunov_haar_strict", lambda: filt.lyapunov(haar, sys).value, -0.1))
    s.add(Bound("lyapunov_constant",
                lambda: abs(filt.lyapunov(const, sys).value), 0.0))
    s.add(Flag("lyapunov_jensen", lambda: filt.lyapunov(f, sys).jensen))
    return s


def _green_oracle(T: tree.Tree) -> np.ndarray:
    P = tree.transition_matrix(T)
    G = np.eye(len(T))
    Pk = np.eye(len(T))
    for _ in range(T.depth):
        Pk = Pk @ P
        G = G + Pk
    return G


def _metric_brute(T: tree.Tree, x: int, y: int) -> float:
    total = 0.0
    for q in reversed(range(len(T))):
        Kx = tree.martin_kernel(T, q, x)
        Ky = tree.martin_kernel(T, q, y)
        d = float(q == x) - float(q == y)
        total += T.D[q] * (abs(Kx - Ky) + abs(d)) / (T.C[q] + 1.0)
    return total


def tree_suite(sys: SystemSpec, f: FilterSpec, seed: int) -> Suite:
    s = Suite("tree")
    haar = _haar(sys)
    const = filt.bundled_filter("constant", sys.N)
    depth = 8 if sys.N == 2 else 5

    @lru_cache(maxsize=None)
    def oracle():
        green = martin = 0.0
        pairs = 0
        for g in (haar, const):
            for x0 in REGULAR_ROOTS:
                T = tree.build_tree(sys, g, x0, depth)
                G = _green_oracle(T)
                green = max(green, float(np.max(np.abs(tree.green_matrix(T) - G))))
                martin = max(martin, _rel(tree.martin_matrix(T), G / G[0][None, :]))
                pairs += len(T) ** 2
        return green, martin, pairs
    s.add(Bound("green_oracle", lambda: oracle()[0], 1e-12))
    s.add(Bound("martin_oracle", lambda: oracle()[1], 1e-12))
    s.add(AtLeast("oracle_pairs", lambda: oracle()[2], 65000))

    def martin_structure():
        T = tree.build_tree(sys, f, REGULAR_ROOTS[0], 6)
        n = len(T)
        inside = np.asarray([[T.in_subtree(x, y) for y in range(n)] for x in range(n)])
        expect = np.where(inside, T.C[:, None], 0.0)
        return float(np.max(np.abs(tree.martin_matrix(T) - expect)))
    s.add(Bound("martin_structure", martin_structure, 0.0))

    def row_stochastic():
        T = tree.build_tree(sys, f, REGULAR_ROOTS[0], 6)
        P = tree.transition_matrix(T)
        inner = T.internal()
        return float(np.max(np.abs(P[inner].sum(axis=1) - 1.0)))
    s.add(Bound("row_stochastic", row_stochastic, 1e-10))

    def triangle():
        T = tree.build_tree(sys, f, REGULAR_ROOTS[1], 3)
        n = len(T)
        rho = np.asarray([[tree.martin_metric(T, x, y)[0] for y in range(n)]
                          for x in range(n)])
        excess = rho[:, None, :] - rho[:, :, None] - rho.T[None, :, :]
        return float(max(np.max(excess), 0.0))
    s.add(Bound("metric_triangle", triangle, 1e-14))

    def brute():
        T = tree.build_tree(sys, f, REGULAR_ROOTS[0], 4)
        a, b = T.children[0][0], T.children[0][-1]
        return abs(tree.martin_metric(T, a, b)[0] - _metric_brute(T, a, b))
    s.add(Bound("metric_brute_force", brute, 1e-14))

    if sys.N == 2:
        def third():
            T = tree.build_tree(sys, haar, 1 / 3, 2)
            y = T.node(1 / 12)
            return abs(tree.transition_pn(T, 0, y, 2) - 0.75 * np.cos(np.pi / 12) ** 2)
        s.add(Bound("transition_p2_one_third", third, 1e-12))

        def refuses():
            T = tree.build_tree(sys, haar, 1 / 3, 6)
            try:
                tree.green(T, 0, 1)
            except RegularityError:
                return True
            return False
        s.add(Flag("periodic_root_refused", refuses))
    return s


def boundary_suite(sys: SystemSpec, f: FilterSpec, seed: int) -> Suite:
    s = Suite("boundary")
    haar = _haar(sys)

    if sys.N == 2:
        s.add(Bound("cylinder_measure_depth2",
                    lambda: abs(boundary.cylinder_measure(
                        haar, boundary.PathPrefix(sys, [1 / 3, 1 / 6, 1 / 12])) -
                                0.75 * np.cos(np.pi / 12) ** 2), 1e-12))

        def first_step():
            p = boundary.sample_paths(sys, haar, 1 / 3, 1, MC_SAMPLES, seed)
            hit = np.count_nonzero(np.abs(p[:, 1] - 1 / 6) < dynsys.POINT_TOL)
            return _binomial_z(hit, MC_SAMPLES, 0.75)
        s.add(Bound("first_step_z", first_step, SIGMA))

    def frequencies():
        T = tree.build_tree(sys, f, REGULAR_ROOTS[0], 3)
        paths = boundary.sample_paths(sys, f, T.root, 3, MC_SAMPLES, seed + 1)
        freq = boundary.cylinder_frequencies(T, paths, 3)
        leaves = np.flatnonzero(T.level == 3)
        return max(_binomial_z(freq[i] * MC_SAMPLES, MC_SAMPLES, T.Wn[i]) for i in leaves)
    s.add(Bound("cylinder_frequency_z", frequencies, BINOMIAL_SIGMA))

    def separation():
        d = 6
        T = tree.build_tree(sys, f, REGULAR_ROOTS[0], d)
        paths = boundary.sample_paths(sys, f, T.root, d, 2000, seed + 2)
        worst = np.inf
        found = 0
        for a, b in zip(paths[0::2], paths[1::2]):
            diff = np.flatnonzero(a != b)
            if diff.shape[0] == 0 or diff[0] > 4:
                continue
            n0 = int(diff[0])
            A = boundary.PathPrefix(sys, a, check=False)
            B = boundary.PathPrefix(sys, b, check=False)
            q = T.locate(A.points)[n0]
            value, _ = boundary.boundary_distance(T, A, B)
            worst = min(worst, value - tree.separation_bound(T, q))
            found += 1
            if found == 100:
                break
        return worst if found == 100 else -1.0
    s.add(AtLeast("separation_margin", separation, -1e-14))
    return s


def harmonic_suite(sys: SystemSpec, f: FilterSpec, seed: int) -> Suite:
    s = Suite("harmonic")
    trees = [tree.build_tree(sys, g, REGULAR_ROOTS[0], 6)
             for g in (_haar(sys), filt.bundled_filter("constant", sys.N))]
    @lru_cache(maxsize=None)
    def trials() -> Dict[str, float]:
        rng = PCG64(seed)
        worst = dict.fromkeys(("p_harmonic", "harmonic_round_trip", "weight_round_trip",
                               "weight_rows", "martin_represent", "quotient"), 0.0)
        for T in trees:
            for _ in range(100):
                nu = harmonic.random_additive(T, rng)
                u = harmonic.additive_to_harmonic(T, nu)
                back = harmonic.harmonic_to_additive(T, u)
                U = harmonic.additive_to_weight(T, nu)
                nu2 = harmonic.weight_to_additive(T, U, nu[0])
                rep = harmonic.martin_represent(T, nu)
                num, den = harmonic.harmonic_quotient(T, u)
                worst["p_harmonic"] = max(worst["p_harmonic"],
                                          harmonic.validate(u, "p-harmonic").residual)
                worst["harmonic_round_trip"] = max(worst["harmonic_round_trip"],
                                                   _rel(back.values, nu.values))
                worst["weight_round_trip"] = max(worst["weight_round_trip"],
                                                 _rel(nu2.values, nu.values))
                worst["weight_rows"] = max(worst["weight_rows"],
                                           harmonic.validate(U, "qmf-weight").residual)
                worst["martin_represent"] = max(worst["martin_represent"],
                                                _rel(rep.values, u.values))
                worst["quotient"] = max(worst["quotient"],
                                        _rel(num.values / den.values, u.values))
        return worst

    for key, tol in (("p_harmonic", 1e-12), ("harmonic_round_trip", 1e-12),
                     ("weight_round_trip", 1e-12), ("weight_rows", 1e-12),
                     ("martin_represent", 1e-12), ("quotient", 1e-10)):
        s.add(Bound(key, lambda key=key: trials()[key], tol))

    roots = [REGULAR_ROOTS[0]]
    for _ in range(4):
        roots.append(dynsys.apply_r(sys, roots[-1]))

    def family(h):
        return harmonic.rw_harmonic_family(sys, f, h, roots, 6)

    def constant_family():
        rep = family(lambda t: np.ones(np.shape(t)))
        return max(rep.additivity, rep.compatibility, rep.reconstruction)
    s.add(Bound("family_constant", constant_family, 1e-12))
    s.add(AtLeast("family_nested_pairs", lambda: family(np.cos).nested, 4))

    def solved_family():
        basis = filt.rw_harmonic_solve(f, sys, 8)
        if not basis:
            return 1.0
        rep = family(basis[0])
        return max(rep.additivity, rep.compatibility, rep.reconstruction)
    s.add(Bound("family_solved", solved_family, 1e-9))

    if f.name == "haar" and sys.N == 2:
        s.add(AtLeast("family_non_harmonic_flagged",
                      lambda: family(lambda t: np.cos(2 * np.pi * t)).additivity, 0.01))
    return s


def _test_functions(sys: SystemSpec):
    return [_expi(1), _expi(2), lambda t: np.cos(2 * np.pi * t),
            lambda t: np.exp(np.sin(2 * np.pi * t))]


def _depth2_cylinder() -> solenoid.ArcCylinder:
    # arcs avoid t = 1/2 and its image, keeping 1 / |m0|^2 bounded
    return solenoid.ArcCylinder([ArcSet([(0.05, 0.2)]), ArcSet([(0.02, 0.3)])])


def solenoid_suite(sys: SystemSpec, f: FilterSpec, seed: int) -> Suite:
    s = Suite("solenoid")
    Z = solenoid.sample_mu_inf_batch(sys, f, 10000, seed=seed)
    phi = solenoid.Constant(1.0)
    U = solenoid.U(f)

    s.add(Bound("theta0_mean_z",
                lambda: _zscore(solenoid.mc_expectation(
                    sys, f, solenoid.Theta(_expi(1), 0), MC_SAMPLES, seed + 1)), SIGMA))
    for m in (1, 2):
        s.add(Bound(f"theta{m}_marginal_z",
                    lambda m=m: _zscore(solenoid.theta_marginal_check(
                        sys, f, _expi(1), m, MC_SAMPLES, seed + 1 + m)), SIGMA))

    def conditional():
        W = solenoid.sample_mu_inf_batch(sys, f, MC_SAMPLES, length=1, forward=0,
                                         seed=seed + 4)
        x0, x1 = W.theta(0), W.theta(1)
        grid = dynsys.preimage_grid(sys, x0)
        p = f.weight(grid)
        j = np.argmin(np.abs(grid - x1[:, None]), axis=-1)
        O = np.bincount(j, minlength=sys.N)
        E = p.sum(axis=0)
        keep = E > 0
        stat = float(np.sum((O[keep] - E[keep]) ** 2 / E[keep]))
        return stat
    if sys.N > 1:
        alpha = 2 * scipy.stats.norm.sf(SIGMA)
        s.add(Bound("conditional_chi2", conditional,
                    float(scipy.stats.chi2.isf(alpha, sys.N - 1))))

    s.add(Bound("scaling_equation",
                lambda: float(np.max(np.abs(U(phi)(Z) - solenoid.Pi(f.m0)(phi)(Z)))), 0.0))

    def covariance():
        worst = 0.0
        Uinv = solenoid.U_inv(f)
        for g in _test_functions(sys):
            lhs = (U @ solenoid.Pi(g) @ Uinv)(phi)(Z)
            rhs = solenoid.Pi(lambda t, g=g: g(dynsys.apply_r(sys, t)))(phi)(Z)
            worst = max(worst, _rel(lhs, rhs))
        return worst
    s.add(Bound("covariance", covariance, 1e-12))

    def cocycle():
        lhs = np.abs((U @ U)(phi)(Z)) ** 2
        return _rel(lhs, solenoid.sample_cocycle_mod2(f, Z, 2))
    s.add(Bound("u2_cocycle", cocycle, 1e-12))

    for k, g in enumerate(_test_functions(sys)[:3]):
        exact = dynsys.integrate_mu(sys, g).value
        s.add(Bound(f"orthogonality_{k}_z",
                    lambda g=g, exact=exact, k=k: _zscore(solenoid.mc_expectation(
                        sys, f, solenoid.Theta(g, 0), MC_SAMPLES, seed + 10 + k), exact),
                    SIGMA))

    xi = _depth2_cylinder()
    for n in (-2, -1, 1, 2):
        def identity(n=n):
            def paired(B):
                return xi(B) - solenoid.sample_cocycle_mod2(f, B, n) * xi(B.shift(n))
            return _zscore(solenoid.mc_expectation(sys, f, paired, MC_SAMPLES,
                                                   seed + 20 + n))
        s.add(Bound(f"cocycle_identity_n{n:+d}_z", identity, SIGMA))
    return s


def decomp_suite(sys: SystemSpec, f: FilterSpec, seed: int) -> Suite:
    s = Suite("decomp")
    haar = _haar(sys)
    const = filt.bundled_filter("constant", sys.N)
    A0 = ArcSet([(0.4, 0.6)])

    @lru_cache(maxsize=None)
    def fibers():
        Z = solenoid.sample_mu_inf_batch(sys, f, 100, length=16, forward=8, seed=seed)
        rng = PCG64(seed + 1)
        g = _expi(1)
        norm = cov = 0.0
        for i in range(len(Z)):
            z = Z[i]
            e = rng.normal(shape=(2, 25))
            v = decomp.FiberVector(z, f, e[0] + 1j * e[1], -16)
            w = decomp.FiberVector(z, f, np.concatenate(([0.0], v.entries[1:])), -16)
            norm = max(norm, abs(decomp.fiber_norm(decomp.fiber_U(w)) -
                                 decomp.fiber_norm(w)) / decomp.fiber_norm(w))
            lhs = decomp.fiber_U(decomp.fiber_pi(g, decomp.fiber_U_inv(v)))
            rhs = decomp.fiber_pi(lambda t: g(dynsys.apply_r(sys, t)), v)
            cov = max(cov, _rel(lhs.entries, rhs.restrict(lhs.lo, lhs.hi).entries))
        return norm, cov
    s.add(Bound("fiber_norm", lambda: fibers()[0], 1e-12))
    s.add(Bound("fiber_covariance", lambda: fibers()[1], 1e-12))

    @lru_cache(maxsize=None)
    def birkhoff():
        rng = PCG64(seed + 2)
        n = 2 ** 14
        long, short = [], []
        for _ in range(100):
            x = dynsys.sample_expansion(sys, n + 64, rng)
            long.append(decomp.birkhoff_sum(sys, f, x, n))
            short.append(decomp.birkhoff_sum(sys, f, x, 2 ** 8))
        return np.asarray(long), np.asarray(short)
    if sys.N > 1:
        s.add(Bound("birkhoff_mean",
                    lambda: abs(float(np.mean(birkhoff()[0])) - filt.lyapunov(f, sys).value),
                    0.02))
        s.add(Flag("birkhoff_concentration",
                   lambda: np.std(birkhoff()[0]) <= np.std(birkhoff()[1])))

    s.add(Bound("visit_whole_circle",
                lambda: max(abs(decomp.visit_probability(sys, f, ArcSet.whole(), m) - 1.0)
                            for m in (1, 2, 3)), 1e-10))

    if sys.N == 2:
        ms = list(range(3, 11))

        @lru_cache(maxsize=None)
        def probs():
            return tuple(decomp.visit_probability(sys, haar, A0, m) for m in ms)
        s.add(Flag("visit_decreasing", lambda: bool(np.all(np.diff(probs()) < 0))))
        s.add(Bound("visit_decay_slope",
                    lambda: decomp.fit_decay_rate(ms, probs()).slope, np.log(0.95)))
        s.add(Bound("visit_constant_control",
                    lambda: max(abs(decomp.visit_probability(sys, const, A0, m) - A0.measure())
                                for m in ms), 1e-10))

        def shift():
            u = [decomp.domain_shift_stat(sys, haar, A0.complement(), 20000, L, seed + 3)
                 .undecided for L in (2, 16, 64)]
            return (u[0] > u[1]) and (u[1] >= u[2])
        s.add(Flag("undecided_decreasing", shift))

        def psi():
            return decomp.psi_isometry_check(sys, haar, _depth2_cylinder(), A0.complement(),
                                             range(-2, 3), MC_SAMPLES, seed + 4).passed
        s.add(Flag("psi_isometry", psi))

    def periodic():
        Z = solenoid.sample_mu_inf_batch(sys, f, 100, seed=seed + 5)
        return all(decomp.non_periodic(Z[i]).non_periodic for i in range(len(Z)))
    s.add(Flag("non_periodic_samples", periodic))
    return s


SUITES: Dict[str, Callable[[SystemSpec, FilterSpec, int], Suite]] = {
    "dynsys": dynsys_suite,
    "filter": filter_suite,
    "tree": tree_suite,
    "boundary": boundary_suite,
    "harmonic": harmonic_suite,
    "solenoid": solenoid_suite,
    "decomp": decomp_suite,
}


def build_suites(names: Iterable[str], sys: SystemSpec, f: FilterSpec,
                 seed: int) -> List[Suite]:
    """
    Build suites by name

    Parameters
    ----------
    names : iterable of str
        Suite names, or ``"all"``
    sys : solharm.dynsys.SystemSpec
        Circle system
    f : solharm.filter.FilterSpec
        QMF filter
    seed : int
        Suite seed

    Returns
    -------
    list of solharm.verify.Suite
        Suites in the order of ``SUITES``

    Raises
    ------
    ValueError
        If a name is unknown.
    """
    names = set(names)
    if "all" in names:
        names = set(SUITES)
    unknown = names - set(SUITES)
    if unknown:
        raise ValueError(f"Unknown suite(s): {sorted(unknown)}")
    sys.require_circle("verify")
    return [build(sys, f, seed) for key, build in SUITES.items() if key in names]


def run_suites(suites: Iterable[Suite]) -> List[CheckResult]:
    out: List[CheckResult] = []
    for s in suites:
        out.extend(s.run())
    return out
