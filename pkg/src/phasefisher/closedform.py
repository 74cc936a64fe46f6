"""Analytical benchmark expressions for QFI/CFI, optima, and thresholds.

Every formula here has an independent numerical counterpart in the Fock-space
or covariance-matrix engines; the test suite cross-checks them within the
validity regime stated on each function.  N always denotes the average quanta
number of the prepared (pre-loss) probe, eta the channel transmission, n_th
the environmental thermal occupation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    ApproximationWarning,
    InvalidArgumentError,
    UndefinedLimitError,
)

_E = math.e


# ---------------------------------------------------------------------------
# Lambert W (principal branch)

def lambert_w(z: float, tol: float = 1e-12, max_iter: int = 80) -> float:
    """Principal-branch solution w of w e^w = z via Halley iteration.

    Valid for z >= -1/e; initial guess log(1 + z) near the origin.
    """
    if z < -1.0 / _E - 1e-15:
        raise InvalidArgumentError(f"principal Lambert W needs z >= -1/e, got {z}")
    if z == 0.0:
        return 0.0
    if z > _E:
        w = math.log(z) - math.log(math.log(z))
    else:
        w = math.log1p(max(z, -1.0 / _E))
    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - z
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0) if w != -1.0 else ew
        step = f / denom
        w -= step
        if abs(step) < tol * (1.0 + abs(w)):
            return w
    raise InvalidArgumentError(f"Lambert W iteration failed to converge for z={z}")


# ---------------------------------------------------------------------------
# Gaussian benchmarks

def sql_qfi(nav: float, eta: float = 1.0, n_th: float = 0.0) -> float:
    """Coherent-probe QFI 4 lambda_C N with lambda_C = eta/(2(1-eta) eta n_th + 1)."""
    if nav < 0:
        raise InvalidArgumentError("nav must be >= 0")
    lam = eta / (2.0 * (1.0 - eta) * eta * n_th + 1.0)
    return 4.0 * lam * nav


@dataclass(frozen=True)
class GaussianBoundResult:
    value: float
    branch: str          # 'squeezed' or 'coherent'
    eta_crit: float


def gaussian_qfi_squeezed(nav: float, eta: float = 1.0, n_th: float = 0.0) -> float:
    """Lossy/thermal QFI of the squeezed vacuum at fixed prepared N."""
    num = 8.0 * eta * eta * nav * (nav + 1.0)
    den = (2.0 * (1.0 - eta) * eta * nav * (2.0 * n_th + 1.0)
           + 2.0 * (1.0 - eta) * n_th * ((1.0 - eta) * n_th + 1.0) + 1.0)
    return num / den


def gaussian_qfi_coherent(nav: float, eta: float = 1.0, n_th: float = 0.0) -> float:
    return 4.0 * eta * nav / (2.0 * (1.0 - eta) * n_th + 1.0)


def gaussian_eta_crit(nav: float, n_th: float = 0.0) -> float:
    """Transmission below which the coherent state beats the squeezed vacuum."""
    if nav <= 0:
        return 0.0
    if n_th == 0.0:
        return (math.sqrt(1.0 + 2.0 * nav) - 1.0) / (2.0 * nav)
    num = (math.sqrt(nav * (4.0 * n_th * (n_th + 1.0) + 2.0) + n_th * (3.0 * n_th + 2.0) + 1.0)
           - 2.0 * nav + n_th - 1.0)
    den = 2.0 * (nav - n_th * (n_th + 2.0))
    if den == 0.0:
        raise UndefinedLimitError("eta_crit undefined at nav = n_th (n_th + 2)")
    return num / den


def gaussian_bound(nav: float, eta: float = 1.0, n_th: float = 0.0) -> GaussianBoundResult:
    """Best Gaussian QFI at fixed N: max of squeezed and coherent branches.

    Ideal case (eta=1, n_th=0) reduces to 8 N^2 + 8 N.
    """
    if nav < 0:
        raise InvalidArgumentError("nav must be >= 0")
    sq = gaussian_qfi_squeezed(nav, eta, n_th)
    coh = gaussian_qfi_coherent(nav, eta, n_th)
    branch = "squeezed" if sq >= coh else "coherent"
    return GaussianBoundResult(max(sq, coh), branch, gaussian_eta_crit(nav, n_th))


def gaussian_bound_value(nav: float, eta: float = 1.0, n_th: float = 0.0) -> float:
    return gaussian_bound(nav, eta, n_th).value


def nav_trans_gaussian(eta: float) -> float:
    """N at which the lossy Gaussian scaling crosses between its asymptotes."""
    if not 0.0 < eta < 1.0:
        raise UndefinedLimitError("transition scale defined only for 0 < eta < 1")
    return 1.0 / (2.0 * eta * (1.0 - eta))


# ---------------------------------------------------------------------------
# displaced Fock states

def displaced_fock_n_opt(nav: float) -> int:
    return int(math.floor((2.0 * nav + 1.0) / 4.0))


def displaced_fock_qfi(nav: float, n: int | None = None) -> float:
    """Ideal QFI 4(1+2n)(N-n); without n, the optimum over integer n.

    The optimum is an exhaustive scan over n <= N; the published
    floor-function expression (displaced_fock_qfi_floor_form) overshoots at
    the boundary points N = 2k - 1/2 where both floors sit high, so it is
    kept as a tested prediction rather than the implementation.
    """
    if nav < 0:
        raise InvalidArgumentError("nav must be >= 0")
    if n is not None:
        if n > nav:
            raise InvalidArgumentError(f"need n <= nav, got n={n}, nav={nav}")
        return 4.0 * (1.0 + 2.0 * n) * (nav - n)
    ns = np.arange(0, int(math.floor(nav)) + 1)
    return float(np.max(4.0 * (1.0 + 2.0 * ns) * (nav - ns)))


def displaced_fock_qfi_floor_form(nav: float) -> float:
    """Published piecewise optimum 4(floor((3-2N)/4)+N)(2 floor((2N+1)/4)+1)."""
    return 4.0 * (math.floor((3.0 - 2.0 * nav) / 4.0) + nav) \
        * (2.0 * math.floor((2.0 * nav + 1.0) / 4.0) + 1.0)


# ---------------------------------------------------------------------------
# ON states

def on_qfi(nav: float, n: int, eta: float = 1.0) -> float:
    """QFI of (|0> + eps |n>)/norm at fixed N; ideal 4N(n-N), lossy

    4 n (n-N) N eta^n / (N eta^n + n - N)  (weak-loss / large-n form).
    """
    if n < nav:
        raise InvalidArgumentError(f"need n >= nav, got n={n}, nav={nav}")
    if not 0.0 < eta <= 1.0:
        raise InvalidArgumentError(f"eta must be in (0, 1], got {eta}")
    if eta == 1.0:
        return 4.0 * nav * (n - nav)
    en = eta ** n
    return 4.0 * n * (n - nav) * nav * en / (nav * en + n - nav)


def on_n_opt(nav: float, eta: float) -> int:
    """Integer n maximizing the lossy ON QFI, by exhaustive scan.

    The scan window [ceil(N), N + 4/(1-eta)] covers the asymptotic prediction
    floor(N + 1/2 - 1/log(eta)).
    """
    if not 0.0 < eta < 1.0:
        raise UndefinedLimitError("ideal case has no finite optimal n")
    lo = max(1, int(math.ceil(nav)))
    hi = max(lo + 1, int(math.ceil(nav + 4.0 / (1.0 - eta))))
    ns = np.arange(lo, hi + 1)
    vals = [on_qfi(nav, int(k), eta) for k in ns]
    return int(ns[int(np.argmax(vals))])


def on_n_opt_prediction(nav: float, eta: float) -> int:
    return int(math.floor(nav + 0.5 - 1.0 / math.log(eta)))


def on_qfi_opt(nav: float, eta: float) -> float:
    return on_qfi(nav, on_n_opt(nav, eta), eta)


def on_qfi_opt_smooth(nav: float, eta: float) -> float:
    """Asymptotic optimal ON QFI (continuous-n approximation)."""
    log_eta = math.log(eta)
    en = eta ** nav
    return 4.0 * nav * en * (nav * log_eta - 1.0) / (log_eta * (_E - nav * en * log_eta))


def on_qfi_small_nav_slope(eta: float) -> float:
    """Slope of the optimized ON QFI at N << 1: -4/(e log eta)."""
    if eta >= 1.0:
        raise UndefinedLimitError("slope diverges at eta = 1")
    return -4.0 / (_E * math.log(eta))


# ---------------------------------------------------------------------------
# SCS (vacuum + coherent superposition)

def scs_qfi_ideal(alpha: float, epsilon: float) -> float:
    """Exact ideal SCS QFI in the (alpha, epsilon) parameterization."""
    a2 = alpha * alpha
    e = epsilon
    g = math.exp(-a2 / 2.0)
    num = 4.0 * a2 * e * e * ((a2 + e * e + 1.0) + 2.0 * g * (a2 + 1.0) * e)
    den = ((e * e + 1.0) + 2.0 * g * e) ** 2
    return num / den


def scs_qfi_constrained(nav: float, alpha_max_sq: float) -> float:
    """Ideal SCS QFI at fixed (N, alpha_max^2): 4N(1 + alpha_max^2 - N)."""
    return 4.0 * nav * (1.0 + alpha_max_sq - nav)


def scs_qfi_lossy(nav: float, alpha_sq: float, eta: float) -> float:
    """Lossy SCS QFI, large-|alpha| form (validity alpha^2 >~ 4)."""
    if alpha_sq < 4.0:
        warnings.warn("lossy SCS QFI form derived for alpha^2 >~ 4",
                      ApproximationWarning, stacklevel=2)
    return 4.0 * eta * nav * (eta * math.exp(-alpha_sq * (1.0 - eta)) * (alpha_sq - nav) + 1.0)


def scs_alpha_opt_sq(nav: float, eta: float) -> float:
    """alpha^2 maximizing the lossy SCS QFI: (N(1-eta) + 1)/(1-eta)."""
    if eta >= 1.0:
        raise UndefinedLimitError("optimal alpha^2 diverges at eta = 1")
    return (nav * (1.0 - eta) + 1.0) / (1.0 - eta)


def scs_qfi_lossy_max(nav: float, eta: float) -> float:
    """Lossy SCS QFI at the optimal alpha^2; unbounded (inf) at eta = 1."""
    if eta == 1.0:
        return math.inf
    return 4.0 * eta * nav * (1.0 + eta * math.exp(-(1.0 - eta) * nav - 1.0) / (1.0 - eta))


def scs_qfi_asymptotes(nav: float, eta: float) -> dict:
    """Piecewise linear scaling of the optimal lossy SCS QFI."""
    if eta >= 1.0:
        raise UndefinedLimitError("asymptotes defined for eta < 1")
    small = 4.0 * eta * nav * (1.0 + eta / (_E * (1.0 - eta)))
    large = 4.0 * eta * nav
    return {"small_nav": small, "large_nav": large,
            "nav_transition": math.log(2.0) / (1.0 - eta)}


def scs_qfi_symmetric_lossy(nav: float, alpha_sq: float, eta: float) -> float:
    """Symmetric (eps=1) SCS under loss: 4 N^2 eta^2 e^{alpha^2(eta-1)} + 4 N eta."""
    return 4.0 * nav * nav * eta * eta * math.exp(alpha_sq * (eta - 1.0)) + 4.0 * nav * eta


# ---------------------------------------------------------------------------
# thresholds

THRESHOLD_KINDS = ("nav_nge_scs", "nav_max_on", "eta_min_scs", "eta_min_on",
                   "eta_min_on_vs_sql", "nav_tran_scs")


def _require_eta(eta):
    if eta is None or not 0.0 < eta < 1.0:
        raise InvalidArgumentError(f"this threshold needs eta in (0, 1), got {eta}")
    return float(eta)


def nav_nge_scs(eta: float) -> float:
    """Largest N with SCS enhancement over the ideal Gaussian bound, weak loss.

    W(e^-1/2)/(1-eta) ~= 0.157/(1-eta); the Lambert constant is evaluated
    exactly.  See nav_nge_scs_exact for the full crossing expression.
    """
    eta = _require_eta(eta)
    return lambert_w(math.exp(-1.0) / 2.0) / (1.0 - eta)


def nav_nge_scs_exact(eta: float) -> float:
    """Exact crossing of the optimal lossy SCS QFI with the ideal bound.

    Derived by solving 4 eta N (1 + eta e^{-(1-eta)N - 1}/(1-eta)) = 8N^2 + 8N:
    N = (-eta^2 + 3 eta - 2 + 2 W(eta^2 e^{eta(eta-3)/2}/2)) / (2(1-eta)).
    """
    eta = _require_eta(eta)
    w = lambert_w(0.5 * eta * eta * math.exp(eta * (eta - 3.0) / 2.0))
    return (-eta * eta + 3.0 * eta - 2.0 + 2.0 * w) / (2.0 * (1.0 - eta))


def _bisect(fn, lo, hi, tol=1e-6, max_iter=200):
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise InvalidArgumentError("bisection bracket does not change sign")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def eta_min_scs() -> float:
    """Loss threshold below which no SCS beats the ideal Gaussian bound.

    Root of the small-N crossing eta (1 + eta/(e(1-eta))) = 2 of the optimal
    lossy SCS QFI against the ideal bound slope.
    """
    return _bisect(lambda e: e * (1.0 + e / (_E * (1.0 - e))) - 2.0, 0.5, 0.95)


def eta_min_on() -> float:
    """Loss threshold below which no ON state beats the ideal Gaussian bound.

    The last surviving advantage is at N -> 0 where the optimized lossy ON QFI
    slope is 4 max_n (n eta^n); the threshold solves max_n n eta^n = 2.
    """
    def margin(eta):
        n = np.arange(1, 400)
        return float(np.max(n * eta ** n)) - 2.0
    return _bisect(margin, 0.7, 0.95)


def eta_min_on_vs_sql() -> float:
    """Transmission where the small-N ON slope meets the small-N Gaussian 8 eta^2 N.

    The two expressions are tangent there (ratio minimum equal to one), so the
    point is located as the minimizer of their ratio; analytically 1/sqrt(e).
    """
    ratio = lambda e: (-1.0 / (2.0 * _E * math.log(e))) / (e * e)
    res = minimize_scalar(ratio, bounds=(0.3, 0.95), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x)


def nav_max_on(eta: float) -> float:
    """Largest N with ON enhancement over the ideal Gaussian bound (numeric)."""
    eta = _require_eta(eta)

    def margin(nav):
        return on_qfi_opt(nav, eta) - 8.0 * nav * nav - 8.0 * nav

    if margin(1e-6) <= 0:
        return 0.0
    hi = 1.0
    while margin(hi) > 0 and hi < 1e4:
        hi *= 2.0
    return _bisect(margin, 1e-6, hi)


def nav_tran_scs(eta: float) -> float:
    eta = _require_eta(eta)
    return math.log(2.0) / (1.0 - eta)


def thresholds(kind: str, eta: float | None = None) -> float:
    """Named thresholds; see the individual functions for definitions."""
    if kind == "nav_nge_scs":
        return nav_nge_scs(eta)
    if kind == "nav_max_on":
        return nav_max_on(eta)
    if kind == "eta_min_scs":
        if eta is not None:
            raise InvalidArgumentError("eta_min_scs takes no eta")
        return eta_min_scs()
    if kind == "eta_min_on":
        if eta is not None:
            raise InvalidArgumentError("eta_min_on takes no eta")
        return eta_min_on()
    if kind == "eta_min_on_vs_sql":
        if eta is not None:
            raise InvalidArgumentError("eta_min_on_vs_sql takes no eta")
        return eta_min_on_vs_sql()
    if kind == "nav_tran_scs":
        return nav_tran_scs(eta)
    raise InvalidArgumentError(f"unknown threshold kind {kind!r}")


# ---------------------------------------------------------------------------
# CFI closed forms

def on_cfi(nav: float, n: int, theta: float, eta: float = 1.0) -> float:
    """ON-state CFI under balanced binary detection.

    Ideal case: the exact rational-trigonometric expression with 2n equal
    peaks on [-pi, pi].  Under loss: the large-n envelope
    4 N eta^n (n - N) sin^2(n theta).
    """
    if n < nav:
        raise InvalidArgumentError(f"need n >= nav, got n={n}, nav={nav}")
    if not 0.0 < eta <= 1.0:
        raise InvalidArgumentError(f"eta must be in (0, 1], got {eta}")
    s2 = math.sin(n * theta) ** 2
    if eta == 1.0:
        c2 = math.cos(n * theta) ** 2
        num = 4.0 * n * n * nav * (n - nav) * s2
        den = n * n + 4.0 * nav * (nav - n) * c2
        return num / den
    return 4.0 * nav * eta ** n * (n - nav) * s2


def on_cfi_max(nav: float, n: int, eta: float) -> float:
    return 4.0 * (n - nav) * nav * eta ** n


def on_cfi_opt_over_n(nav: float, eta: float) -> float:
    """Max of 4 N eta^n (n-N) over n: -4 N eta^N / (e log eta)."""
    if eta >= 1.0:
        raise UndefinedLimitError("unbounded at eta = 1")
    return -4.0 * nav * eta ** nav / (_E * math.log(eta))


def symmetric_on_cfi_max(nav: float, eta: float = 1.0) -> float:
    """Peak CFI of the symmetric ON probe (n = 2N) with balanced detection."""
    e2n = eta ** (2.0 * nav)
    return 16.0 * nav * nav * e2n / (2.0 * e2n - e2n * e2n + 3.0)


def on_readout_coeffs(epsilon: float, n: int, eps_prime: float, eta: float) -> tuple:
    """Harmonic-readout coefficients (A, B) with P = A + B cos(n theta)."""
    en = eta ** n
    den = (1.0 + epsilon ** 2) * (1.0 + eps_prime ** 2)
    a = (epsilon ** 2 * eps_prime ** 2 * en + 1.0) / den
    b = 2.0 * epsilon * eps_prime * eta ** (n / 2.0) / den
    return a, b


def on_readout_probability(epsilon: float, n: int, eps_prime: float,
                           eta: float, theta: float) -> float:
    a, b = on_readout_coeffs(epsilon, n, eps_prime, eta)
    return a + b * math.cos(n * theta)


def scs_cfi_asymptotic(nav: float, alpha_sq: float, eta: float, theta: float) -> float:
    """Large-alpha SCS CFI under symmetric-superposition detection.

    4 a^4 eta N e^{-2 a^2 (1 - sqrt(eta) cos th)} cos^2(a^2 sqrt(eta) sin th) / (a^2 + N).
    """
    if alpha_sq < 4.0:
        warnings.warn("asymptotic SCS CFI derived for alpha^2 >~ 4",
                      ApproximationWarning, stacklevel=2)
    se = math.sqrt(eta)
    envelope = math.exp(-2.0 * alpha_sq * (1.0 - se * math.cos(theta)))
    osc = math.cos(alpha_sq * se * math.sin(theta)) ** 2
    return 4.0 * alpha_sq ** 2 * eta * nav * envelope * osc / (alpha_sq + nav)


def scs_cfi_peak(nav: float, alpha_sq: float, eta: float) -> float:
    se = math.sqrt(eta)
    return (4.0 * alpha_sq ** 2 * eta * nav
            * math.exp(-2.0 * alpha_sq * (1.0 - se)) / (alpha_sq + nav))


def scs_cfi_first_zero(alpha_sq: float, eta: float) -> float:
    return math.asin(math.pi / (2.0 * alpha_sq * math.sqrt(eta)))


def scs_cfi_half_width(alpha_sq: float, eta: float) -> float:
    return math.asin(math.pi / (4.0 * alpha_sq * math.sqrt(eta)))


def _genlaguerre(n: int, a: int, x: float) -> float:
    # stable three-term recurrence upward in degree
    if n == 0:
        return 1.0
    lm1, l = 1.0, 1.0 + a - x
    for k in range(1, n):
        lm1, l = l, ((2.0 * k + 1.0 + a - x) * l - (k + a) * lm1) / (k + 1.0)
    return l


def displaced_fock_cfi(alpha: float, n: int, theta: float) -> float:
    """Ideal displaced-Fock CFI for binary self-projection.

    4 a^4 sin^2 th (L_n(x) + 2 L^1_{n-1}(x))^2 / (e^x - L_n(x)^2) with
    x = 2 a^2 (1 - cos th); reaches the QFI 4(1+2n) a^2 as theta -> 0.
    """
    if n < 0:
        raise InvalidArgumentError("n must be >= 0")
    a2 = alpha * alpha
    x = 2.0 * a2 * (1.0 - math.cos(theta))
    if x < 1e-12:
        return 4.0 * (1.0 + 2.0 * n) * a2
    ln = _genlaguerre(n, 0, x)
    l1 = _genlaguerre(n - 1, 1, x) if n >= 1 else 0.0
    den = math.exp(x) - ln * ln
    if den <= 0.0:
        return 0.0
    return 4.0 * a2 * a2 * math.sin(theta) ** 2 * (ln + 2.0 * l1) ** 2 / den


def gaussian_cfi_binary(nav: float, eta: float, theta: float) -> float:
    """Lossy squeezed-vacuum CFI under binary projection onto itself.

    Evaluates the published closed form (with its overall sign oriented so the
    result is positive; the printed version has the bracket inverted).  Under
    loss the curve has an exact dip to zero at theta = 0; at eta = 1 the
    theta -> 0 limit equals the ideal Gaussian bound 8N^2 + 8N.
    """
    if nav < 0:
        raise InvalidArgumentError("nav must be >= 0")
    if not 0.0 < eta <= 1.0:
        raise InvalidArgumentError(f"eta must be in (0, 1], got {eta}")
    if nav == 0.0:
        return 0.0
    s = math.asinh(math.sqrt(nav))
    e2, e4, e6, e8 = (math.exp(k * s) for k in (2, 4, 6, 8))
    if eta == 1.0 and abs(theta) < 1e-7:
        return 8.0 * nav * nav + 8.0 * nav
    inner = (eta * math.cos(2.0 * theta) * (e4 - 1.0) ** 2
             + (-4.0 * (1.0 - eta) ** 2 + 6.0 * (1.0 - eta) - 6.0) * e4
             + 2.0 * (-eta - 1.0) * (1.0 - eta) * (e2 + e6)
             - eta * e8 - eta)
    numer = 2.0 * math.sqrt(2.0) * eta * eta * math.sin(2.0 * theta) ** 2 * (e4 - 1.0) ** 4
    bracket = math.sqrt(max(-inner, 0.0) / e4) - 2.0 * math.sqrt(2.0)
    den = inner * inner * bracket
    if den <= 0.0:
        return 0.0
    return numer / den


def symmetric_cfi_ratio(nav: float, eta: float, family: str,
                        theta_points: int = 2001) -> float:
    """Peak CFI of the symmetric probe over the peak binary-Gaussian CFI.

    ON uses n = 2N (nearest integer when 2N is fractional); SCS uses eps = 1
    with the asymptotic detection model at alpha^2 = 2N + 2 sqrt(2N)
    (symmetric weight puts N ~= alpha^2/2).
    """
    if nav <= 0:
        raise InvalidArgumentError("nav must be > 0")
    thetas = np.linspace(1e-4, math.pi / 2.0, theta_points)
    gauss = max(gaussian_cfi_binary(nav, eta, t) for t in thetas)
    if family == "on":
        n = max(1, int(round(2.0 * nav)))
        if abs(2.0 * nav - round(2.0 * nav)) > 1e-9:
            warnings.warn("2N is not an integer; using the nearest Fock level",
                          ApproximationWarning, stacklevel=2)
        eps = math.sqrt(nav / (n - nav)) if n > nav else 1.0
        probe = max(_on_binary_cfi(eps, n, eta, t) for t in thetas)
    elif family == "scs":
        alpha_sq = 2.0 * nav + 2.0 * math.sqrt(2.0 * nav)
        probe = max(scs_cfi_asymptotic(nav, alpha_sq, eta, t) for t in thetas)
    else:
        raise InvalidArgumentError(f"family must be 'on' or 'scs', got {family!r}")
    return probe / gauss


def _on_binary_cfi(epsilon: float, n: int, eta: float, theta: float) -> float:
    a, b = on_readout_coeffs(epsilon, n, 1.0, eta)
    p = a + b * math.cos(n * theta)
    if not 0.0 < p < 1.0:
        return 0.0
    dp = -n * b * math.sin(n * theta)
    return dp * dp / (p * (1.0 - p))
