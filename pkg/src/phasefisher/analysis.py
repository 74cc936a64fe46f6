"""Study-level computations: constrained optima, trade-off frontiers,
uncertainty-vs-loss tables, the Gaussian-mixture bound, contrast/visibility.

Scans are deterministic given their configuration; randomized studies derive
one RNG stream per sample from (seed, index) so serial and parallel runs
agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import closedform as cf
from . import channels, fisher, fock, probes
from .channels import NoiseSpec
from .errors import InfeasibleError, InvalidArgumentError
from .probes import ProbeSpec

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(fn, lo: float, hi: float, tol: float = 1e-6) -> tuple:
    """Golden-section search for the maximum of a unimodal function."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


# ---------------------------------------------------------------------------
# constrained probe optimization

@dataclass(frozen=True)
class OptimizeResult:
    spec: ProbeSpec
    score: float
    objective: str
    constraint: str
    at_boundary: bool
    scan: dict = field(default_factory=dict)


def _scs_objective(noise: NoiseSpec, objective: str):
    if objective == "qfi":
        if noise.eta == 1.0:
            return lambda nav, a2: cf.scs_qfi_constrained(nav, a2)
        return lambda nav, a2: cf.scs_qfi_lossy(nav, a2, noise.eta)
    if objective == "peak_cfi":
        return lambda nav, a2: cf.scs_cfi_peak(nav, a2, noise.eta)
    if objective == "mean_cfi_over_nge":
        def obj(nav, a2):
            pt = _scs_frontier_point(nav, a2, noise)
            return pt[1] if pt is not None else 0.0
        return obj
    raise InvalidArgumentError(f"unknown objective {objective!r}")


def optimize_probe(family: str, constraint: str, value: float, noise: NoiseSpec,
                   objective: str = "qfi", n_cap: int = 50,
                   alpha_sq_cap: float = 60.0) -> OptimizeResult:
    """Grid search plus golden-section refinement on the free coordinate.

    Ideal unbounded families (ON in n, SCS in alpha^2 at eta = 1) are capped by
    n_cap / alpha_sq_cap and flagged at_boundary when the cap binds.
    """
    if value <= 0:
        raise InfeasibleError("constraint value must be > 0")

    if family == "on_state":
        if constraint == "fixed_N":
            nav = value
            lo = max(1, int(math.ceil(nav + 1e-12)))
            if lo > n_cap:
                raise InfeasibleError(f"no Fock level in [{lo}, {n_cap}]")
            ns = np.arange(lo, n_cap + 1)
            if objective == "qfi":
                vals = [cf.on_qfi(nav, int(n), noise.eta) for n in ns]
            elif objective == "peak_cfi":
                vals = [cf.on_cfi_max(nav, int(n), noise.eta) for n in ns]
            else:
                vals = [_on_mean_cfi_over_nge(nav, int(n), noise) for n in ns]
            k = int(np.argmax(vals))
            n_best = int(ns[k])
            spec = ProbeSpec("on_state", {"n": n_best,
                                          "epsilon": probes.on_epsilon_for_nav(n_best, nav)})
            return OptimizeResult(spec, float(vals[k]), objective, constraint,
                                  n_best == n_cap, {"n": ns.tolist(), "value": list(map(float, vals))})
        if constraint == "fixed_n_max":
            n = int(value)
            nav, score = golden_section_max(
                lambda N: cf.on_qfi(N, n, noise.eta), 1e-6, n - 1e-6)
            spec = ProbeSpec("on_state", {"n": n, "epsilon": probes.on_epsilon_for_nav(n, nav)})
            return OptimizeResult(spec, score, objective, constraint, False, {})
        raise InvalidArgumentError(f"unsupported constraint {constraint!r} for ON states")

    if family == "scs":
        obj = _scs_objective(noise, objective)
        if constraint == "fixed_N":
            nav = value
            a2_lo = max(4.0, nav * 1.05 + 0.5)
            if a2_lo >= alpha_sq_cap:
                raise InfeasibleError("alpha_sq_cap below the feasible region")
            grid = np.linspace(a2_lo, alpha_sq_cap, 80)
            vals = [obj(nav, a2) for a2 in grid]
            k = int(np.argmax(vals))
            lo = grid[max(k - 1, 0)]
            hi = grid[min(k + 1, grid.size - 1)]
            a2_best, score = golden_section_max(lambda a2: obj(nav, a2), lo, hi)
            at_boundary = a2_best > alpha_sq_cap - 1.5 * (grid[1] - grid[0])
            alpha = math.sqrt(a2_best)
            spec = ProbeSpec("scs", {"alpha": alpha,
                                     "epsilon": probes.scs_epsilon_for_nav(alpha, nav)})
            return OptimizeResult(spec, score, objective, constraint, at_boundary,
                                  {"alpha_sq": grid.tolist(), "value": list(map(float, vals))})
        if constraint == "fixed_alpha_max":
            a2 = value
            alpha = math.sqrt(a2)
            eps_grid = np.geomspace(1e-3, 10.0, 200)
            vals = [cf.scs_qfi_ideal(alpha, e) if noise.eta == 1.0
                    else cf.scs_qfi_lossy(probes.scs_nav(alpha, e), a2, noise.eta)
                    for e in eps_grid]
            k = int(np.argmax(vals))
            lo = eps_grid[max(k - 1, 0)]
            hi = eps_grid[min(k + 1, eps_grid.size - 1)]
            fn = (lambda e: cf.scs_qfi_ideal(alpha, e)) if noise.eta == 1.0 else \
                 (lambda e: cf.scs_qfi_lossy(probes.scs_nav(alpha, e), a2, noise.eta))
            eps_best, score = golden_section_max(fn, lo, hi, tol=1e-8)
            spec = ProbeSpec("scs", {"alpha": alpha, "epsilon": eps_best})
            return OptimizeResult(spec, score, objective, constraint, False,
                                  {"epsilon": eps_grid.tolist(), "value": list(map(float, vals))})
        raise InvalidArgumentError(f"unsupported constraint {constraint!r} for SCS")

    raise InvalidArgumentError(f"unsupported family {family!r}")


# ---------------------------------------------------------------------------
# precision/range frontier

@dataclass(frozen=True)
class FrontierPoint:
    delta_theta: float
    mean_cfi: float
    params: ProbeSpec
    regime: NoiseSpec


def _scs_curve(nav: float, alpha_sq: float, eta: float) -> fisher.FisherCurve:
    core = 8.0 * math.pi / alpha_sq
    grid = fisher.refined_grid(min(core, math.pi / 2), n_core=1601, n_outer=201)
    vals = [cf.scs_cfi_asymptotic(nav, alpha_sq, eta, t) for t in grid]
    return fisher.FisherCurve(grid, vals, {"model": "scs_asymptotic"})


def _on_curve(nav: float, n: int, eta: float) -> fisher.FisherCurve:
    eps = probes.on_epsilon_for_nav(n, nav)
    grid = fisher.uniform_grid(max(1201, 40 * n + 1), (-math.pi / 2, math.pi / 2))
    vals = [cf._on_binary_cfi(eps, n, eta, t) for t in grid]
    return fisher.FisherCurve(grid, vals, {"model": "on_binary"})


def _scs_frontier_point(nav, alpha_sq, noise):
    curve = _scs_curve(nav, alpha_sq, noise.eta)
    bound = cf.gaussian_bound_value(nav, noise.eta, noise.n_th)
    intervals, delta = fisher.nge_range(curve, bound)
    if delta <= 0.0:
        return None
    return delta, fisher.mean_cfi(curve, intervals)


def _on_mean_cfi_over_nge(nav, n, noise):
    curve = _on_curve(nav, n, noise.eta)
    bound = cf.gaussian_bound_value(nav, noise.eta, noise.n_th)
    intervals, delta = fisher.nge_range(curve, bound)
    if delta <= 0.0:
        return 0.0
    return fisher.mean_cfi(curve, intervals)


def nondominated(points) -> list:
    """Drop points dominated in (mean_cfi, delta_theta), both maximized."""
    keep = []
    for p in points:
        dominated = any(
            (q.mean_cfi >= p.mean_cfi and q.delta_theta >= p.delta_theta
             and (q.mean_cfi > p.mean_cfi or q.delta_theta > p.delta_theta))
            for q in points if q is not p)
        if not dominated:
            keep.append(p)
    return sorted(keep, key=lambda p: p.delta_theta)


def frontier(family: str, nav: float, noise: NoiseSpec,
             alpha_sq_grid=None, n_grid=None) -> list:
    """Nondominated (mean CFI over enhancement range, range length) points."""
    if nav <= 0:
        raise InvalidArgumentError("nav must be > 0")
    pts = []
    if family == "scs":
        if alpha_sq_grid is None:
            alpha_sq_grid = np.geomspace(max(4.0, 3.0 * nav + 1.0), 40.0 * (nav + 1.0), 40)
        for a2 in alpha_sq_grid:
            res = _scs_frontier_point(nav, float(a2), noise)
            if res is None:
                continue
            alpha = math.sqrt(a2)
            spec = ProbeSpec("scs", {"alpha": alpha,
                                     "epsilon": probes.scs_epsilon_for_nav(alpha, nav)})
            pts.append(FrontierPoint(res[0], res[1], spec, noise))
    elif family == "on_state":
        if n_grid is None:
            n_grid = range(max(1, int(math.ceil(nav)) + 1), int(12 * (nav + 2)))
        for n in n_grid:
            curve = _on_curve(nav, int(n), noise.eta)
            bound = cf.gaussian_bound_value(nav, noise.eta, noise.n_th)
            intervals, delta = fisher.nge_range(curve, bound)
            if delta <= 0.0:
                continue
            spec = ProbeSpec("on_state", {"n": int(n),
                                          "epsilon": probes.on_epsilon_for_nav(int(n), nav)})
            pts.append(FrontierPoint(delta, fisher.mean_cfi(curve, intervals), spec, noise))
    else:
        raise InvalidArgumentError(f"unsupported family {family!r}")
    return nondominated(pts)


# ---------------------------------------------------------------------------
# uncertainty vs loss

@dataclass(frozen=True)
class UncertaintyTable:
    rows: list  # dicts: family, nav, eta, fisher, dtheta
    mode: str
    alpha_sq_cap: float

    def dtheta(self, family: str, nav: float, eta: float) -> float:
        for r in self.rows:
            if (r["family"] == family and abs(r["nav"] - nav) < 1e-12
                    and abs(r["eta"] - eta) < 1e-12):
                return r["dtheta"]
        raise KeyError((family, nav, eta))

    def ratio(self, nav: float, eta: float, family: str = "scs") -> float:
        """dtheta_Gauss / dtheta_family at matched (N, eta)."""
        return self.dtheta("gaussian", nav, eta) / self.dtheta(family, nav, eta)


def _scs_best_cfi_peak(nav: float, eta: float, alpha_sq_cap: float) -> float:
    if eta == 1.0:
        return cf.scs_cfi_peak(nav, alpha_sq_cap, 1.0)
    a2_opt = min(cf.scs_alpha_opt_sq(nav, eta) * 1.2, alpha_sq_cap)
    x, val = golden_section_max(lambda a2: cf.scs_cfi_peak(nav, a2, eta),
                                max(4.0, nav + 0.5), max(a2_opt, 8.0))
    return val


def _gaussian_best_cfi(nav: float, eta: float) -> float:
    thetas = np.linspace(1e-4, math.pi / 2, 3001)
    return max(cf.gaussian_cfi_binary(nav, eta, t) for t in thetas)


def uncertainty_vs_loss(families, nav_list, eta_grid, mode: str = "cfi",
                        alpha_sq_cap: float = 2000.0, n_cap: int = 4000) -> UncertaintyTable:
    """Table of dtheta = 1/sqrt(F) per family, N, eta.

    mode='qfi' uses the optimal-probe QFI closed forms; mode='cfi' uses each
    family's detection-model peak CFI (binary self-projection for the Gaussian
    benchmark).  At eta = 1 the unbounded families are reported at the stated
    caps.
    """
    rows = []
    for nav in nav_list:
        for eta in eta_grid:
            for fam in families:
                if fam == "gaussian":
                    f = (cf.gaussian_bound_value(nav, eta) if mode == "qfi"
                         else _gaussian_best_cfi(nav, eta))
                elif fam == "scs":
                    if mode == "qfi":
                        f = (cf.scs_qfi_constrained(nav, alpha_sq_cap) if eta == 1.0
                             else cf.scs_qfi_lossy_max(nav, eta))
                    else:
                        f = _scs_best_cfi_peak(nav, eta, alpha_sq_cap)
                elif fam == "on_state":
                    if mode == "qfi":
                        f = (cf.on_qfi(nav, n_cap, 1.0) if eta == 1.0
                             else cf.on_qfi_opt(nav, eta))
                    else:
                        f = (cf.on_cfi_max(nav, n_cap, 1.0) if eta == 1.0
                             else cf.on_cfi_opt_over_n(nav, eta))
                else:
                    raise InvalidArgumentError(f"unsupported family {fam!r}")
                rows.append({"family": fam, "nav": float(nav), "eta": float(eta),
                             "fisher": float(f),
                             "dtheta": float("inf") if f <= 0 else 1.0 / math.sqrt(f)})
    return UncertaintyTable(rows, mode, alpha_sq_cap)


# ---------------------------------------------------------------------------
# Gaussian-mixture bound study

@dataclass(frozen=True)
class MixtureSample:
    purity: float
    qfi_ratio: float
    nav: float
    params: dict


@dataclass(frozen=True)
class MixtureStudyResult:
    slope: float
    intercept: float
    samples: list
    violations: list
    seed: int


def _sample_mixture(rng: np.random.Generator, nav_target: float, dim: int):
    # Both components are rescaled to the shared N_av: convexity of the QFI in
    # the state would otherwise let unequal-energy mixtures trivially beat the
    # bound evaluated at the mean N, which is not the conjecture under test.
    p = rng.uniform()
    comps = []
    for _ in range(2):
        # quartic radial bias keeps a good share of squeezing-dominated draws,
        # which are the ones that trace the lower envelope
        r = 2.0 * rng.uniform() ** 4
        phi = rng.uniform(0.0, 2.0 * math.pi)
        alpha = r * np.exp(1j * phi)
        zeta = rng.uniform(0.0, 1.0)

        def nav_of(s):
            return math.sinh(s * zeta) ** 2 + (s * abs(alpha)) ** 2
        hi = 1.0
        for _ in range(200):
            if nav_of(hi) >= nav_target:
                break
            hi *= 1.5
        else:
            raise InvalidArgumentError("degenerate component draw cannot reach N_av")
        s = brentq(lambda x: nav_of(x) - nav_target, 0.0, hi, xtol=1e-12)
        comps.append({"alpha": s * alpha, "zeta": s * zeta})
    return p, comps


def mixture_study(n_samples: int, rng_seed: int, nav_range=(0.2, 2.0),
                  dim: int = 96, bins: int = 20) -> MixtureStudyResult:
    """Random two-component displaced-squeezed mixtures vs the Gaussian bound.

    Per sample: purity and F_Q / F_Q^Gauss at the mixture's own N_av.  The
    lower envelope of log(1 - ratio) against log(1 - purity) is fitted by
    least squares through the per-bin minima.
    """
    if n_samples < 100:
        raise InvalidArgumentError("need at least 100 samples")
    g_num = fock.number_op(dim)
    samples = []
    violations = []
    for idx in range(n_samples):
        rng = np.random.default_rng(np.random.SeedSequence((rng_seed, idx)))
        nav_target = rng.uniform(*nav_range)
        p, comps = _sample_mixture(rng, nav_target, dim)
        s1 = probes.displaced_squeezed(comps[0]["alpha"], comps[0]["zeta"], dim)
        s2 = probes.displaced_squeezed(comps[1]["alpha"], comps[1]["zeta"], dim)
        mat = p * np.outer(s1.amps, s1.amps.conj()) + (1 - p) * np.outer(s2.amps, s2.amps.conj())
        nav = float(np.real(np.sum(np.arange(dim) * np.diag(mat))))
        qfi = fisher.qfi_sld_mat(mat, g_num)
        bound = cf.gaussian_bound_value(nav)
        ratio = qfi / bound
        purity = float(np.sum(np.abs(mat) ** 2))
        sample = MixtureSample(purity, ratio, nav, {"p": p, "components": comps})
        samples.append(sample)
        if ratio > 1.0 + 1e-6:
            violations.append(sample)

    xs, ys = [], []
    for s in samples:
        if 1.0 - s.purity > 1e-12 and 1.0 - s.qfi_ratio > 1e-14:
            xs.append(math.log(1.0 - s.purity))
            ys.append(math.log(1.0 - s.qfi_ratio))
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    edges = np.linspace(xs.min(), xs.max() + 1e-12, bins + 1)
    bx, by = [], []
    for k in range(bins):
        mask = (xs >= edges[k]) & (xs < edges[k + 1])
        if np.any(mask):
            i = np.argmin(ys[mask])
            bx.append(xs[mask][i])
            by.append(ys[mask][i])
    slope, intercept = np.polyfit(bx, by, 1)
    return MixtureStudyResult(float(slope), float(intercept), samples, violations, rng_seed)


# ---------------------------------------------------------------------------
# contrast / visibility trade-off

@dataclass(frozen=True)
class ContrastRecord:
    a: float
    b: float
    visibility: float
    contrast: float
    max_slope: float


def contrast_visibility(nav: float, epsilon: float, eps_prime: float, eta: float,
                        family: str = "on") -> ContrastRecord:
    """Readout-signal metrics A, B, V = B/A, C = 2B, and the peak slope.

    ON states use the harmonic closed form P = A + B cos(n theta); SCS fall
    back to a numerically sampled P(theta) with the same reductions.
    """
    if epsilon <= 0 or eps_prime <= 0:
        raise InvalidArgumentError("epsilon and eps_prime must be > 0")
    if family == "on":
        n = nav * (1.0 + epsilon ** 2) / epsilon ** 2
        if abs(n - round(n)) > 1e-9:
            n_int = max(1, int(round(n)))
        else:
            n_int = int(round(n))
        a, b = cf.on_readout_coeffs(epsilon, n_int, eps_prime, eta)
        slope = n_int * b
    elif family == "scs":
        alpha_sq = nav * (1.0 + epsilon ** 2) / epsilon ** 2
        alpha = math.sqrt(alpha_sq)
        dim = fock.default_dim(alpha)
        psi = probes.scs(alpha, epsilon, dim)
        rho = channels.apply_noise(psi.projector(), NoiseSpec(eta=eta))
        m = fock.vacuum(dim).amps + eps_prime * fock.coherent_state(alpha, dim).amps
        m = m / np.linalg.norm(m)
        period = 2.0 * math.pi / max(alpha_sq * math.sqrt(eta), 1.0)
        grid = np.linspace(-2.0 * period, 2.0 * period, 801)
        pv = np.array([float(np.real(m.conj() @ channels.rotate_mat(rho.mat, t) @ m))
                       for t in grid])
        a = 0.5 * (pv.max() + pv.min())
        b = 0.5 * (pv.max() - pv.min())
        slope = float(np.max(np.abs(np.gradient(pv, grid))))
    else:
        raise InvalidArgumentError(f"family must be 'on' or 'scs', got {family!r}")
    return ContrastRecord(a, b, b / a, 2.0 * b, slope)


def visibility_opt_eps_prime(nav: float, epsilon: float, eta: float) -> float:
    """eps' maximizing V for an ON probe: eta^{-n/2}/epsilon."""
    n = nav * (1.0 + epsilon ** 2) / epsilon ** 2
    return eta ** (-n / 2.0) / epsilon


# ---------------------------------------------------------------------------
# additivity of QFI over copies

def qfi_additivity_check(spec: ProbeSpec, copies: int = 2, dim_small: int = 20) -> float:
    """QFI(rho x rho, n1 + n2) / (2 QFI(rho)); 1 within numerics."""
    if copies != 2:
        raise InvalidArgumentError("only two copies are supported")
    if dim_small ** 2 > 40000:
        raise InvalidArgumentError("dim_small too large for the tensor square")
    state = probes.build(spec, dim_small)
    rho = fock.as_density(state).mat
    single = fisher.qfi_sld_mat(rho, fock.number_op(dim_small))
    n1 = np.kron(fock.number_op(dim_small), np.eye(dim_small))
    n2 = np.kron(np.eye(dim_small), fock.number_op(dim_small))
    joint = np.kron(rho, rho)
    double = fisher.qfi_sld_mat(joint, n1 + n2)
    if single < 1e-12 and double < 1e-12:
        return 1.0
    return double / (2.0 * single)
