"""Quantum and classical Fisher information estimators and curve metrics.

Three QFI routes are provided: generator variance for pure states, a
fidelity-based symmetric difference with Richardson extrapolation for mixed
states, and the spectral (symmetric logarithmic derivative) sum.  The CFI is
computed from outcome distributions by central differences.  Curve-level
metrics (peak, FWHM, mean CFI, enhancement range) operate on sampled
theta -> F grids with linear interpolation at threshold crossings.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import channels, fock
from .errors import (
    InvalidArgumentError,
    InvalidDistributionError,
    NumericalInstabilityError,
    PeakUnresolvedError,
)
from .fock import DensityMatrix, OperatorMatrix, OscillatorState, as_density

DEFAULT_DTHETA = 1e-3
CFI_PROB_FLOOR = 1e-12
CFI_DERIV_FLOOR = 1e-9


@dataclass(frozen=True)
class QfiResult:
    value: float
    method: str
    dtheta_used: float = 0.0
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FisherCurve:
    """Sampled map theta -> F(theta) with metadata."""

    thetas: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        va = np.asarray(self.values, dtype=float)
        if th.ndim != 1 or th.shape != va.shape:
            raise InvalidArgumentError("thetas and values must be matching 1-d arrays")
        if th.size >= 2 and not np.all(np.diff(th) > 0):
            raise InvalidArgumentError("theta grid must be strictly increasing")
        if not np.all(np.isfinite(va)):
            raise InvalidArgumentError("curve values must be finite")
        if np.min(va, initial=0.0) < -1e-9:
            raise InvalidArgumentError("curve values must be >= -1e-9")
        object.__setattr__(self, "thetas", fock._freeze(th))
        object.__setattr__(self, "values", fock._freeze(np.clip(va, 0.0, None)))

    def peak(self) -> tuple:
        i = int(np.argmax(self.values))
        return float(self.thetas[i]), float(self.values[i])

    def to_csv(self, header_lines=()) -> str:
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        buf.write("theta,value\n")
        for t, v in zip(self.thetas, self.values):
            buf.write(f"{t:.12g},{v:.12g}\n")
        return buf.getvalue()


def uniform_grid(n: int = 801, span=(-np.pi / 2, np.pi / 2)) -> np.ndarray:
    return np.linspace(span[0], span[1], n)


def refined_grid(core_halfwidth: float, n_core: int = 801, n_outer: int = 201,
                 span=(-np.pi / 2, np.pi / 2)) -> np.ndarray:
    """Uniform outer grid plus a dense core around theta = 0 for narrow peaks."""
    outer = np.linspace(span[0], span[1], n_outer)
    w = min(core_halfwidth, span[1])
    core = np.linspace(-w, w, n_core)
    return np.unique(np.concatenate([outer, core]))


# ---------------------------------------------------------------------------
# QFI estimators

def qfi_pure(psi: OscillatorState, generator: OperatorMatrix) -> QfiResult:
    """4 Var(G) for a pure state under exp(-i theta G)."""
    g = generator.mat
    if np.max(np.abs(g - g.conj().T)) > 1e-9:
        raise InvalidArgumentError("generator must be Hermitian")
    gpsi = g @ psi.amps
    mean = np.real(np.vdot(psi.amps, gpsi))
    mean2 = np.real(np.vdot(gpsi, gpsi))
    return QfiResult(4.0 * float(mean2 - mean * mean), "pure_variance")


def qfi_fidelity(rho, dtheta: float = DEFAULT_DTHETA, rel_tol: float = 0.01) -> QfiResult:
    """Fidelity-based QFI 4(1 - F(rho, rho_dtheta))/dtheta^2, Richardson-extrapolated.

    The two step sizes {dtheta, dtheta/2} are combined to cancel the leading
    O(dtheta^2) error; their spread is reported and a spread above rel_tol of
    the value raises NumericalInstabilityError.
    """
    if not 1e-5 <= dtheta <= 1e-2:
        raise InvalidArgumentError(f"dtheta must lie in [1e-5, 1e-2], got {dtheta}")
    r = as_density(rho)

    def estimate(h):
        rot = channels.rotate_mat(r.mat, h)
        return 4.0 * (1.0 - fock.fidelity_mats(r.mat, rot)) / (h * h)

    e1 = estimate(dtheta)
    e2 = estimate(dtheta / 2.0)
    value = (4.0 * e2 - e1) / 3.0
    spread = abs(e1 - e2)
    diag = {"estimate_dtheta": e1, "estimate_half": e2, "spread": spread}
    if spread > max(rel_tol * abs(value), 1e-9):
        raise NumericalInstabilityError(
            f"fidelity QFI did not converge: estimates {e1:.6g} / {e2:.6g}",
            estimates=diag)
    return QfiResult(max(value, 0.0), "fidelity_fd", dtheta, diag)


def qfi_sld(rho, generator: OperatorMatrix | None = None,
            eig_floor: float = 1e-12) -> QfiResult:
    """Spectral QFI 2 sum_{ij} (li - lj)^2 / (li + lj) |<i|G|j>|^2."""
    r = as_density(rho)
    if generator is None:
        g = fock.number_op(r.dim)
    else:
        g = generator.mat
        if np.max(np.abs(g - g.conj().T)) > 1e-9:
            raise InvalidArgumentError("generator must be Hermitian")
    w, v = np.linalg.eigh(r.mat)
    w = np.clip(w, 0.0, None)
    gt = v.conj().T @ g @ v
    denom = w[:, None] + w[None, :]
    num = (w[:, None] - w[None, :]) ** 2
    mask = denom > eig_floor
    ratio = np.zeros_like(denom)
    ratio[mask] = num[mask] / denom[mask]
    value = 2.0 * float(np.sum(ratio * np.abs(gt) ** 2))
    return QfiResult(max(value, 0.0), "sld_spectral")


def qfi_sld_mat(mat: np.ndarray, g: np.ndarray, eig_floor: float = 1e-12) -> float:
    """Raw-array variant of qfi_sld for hot loops."""
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    gt = v.conj().T @ g @ v
    denom = w[:, None] + w[None, :]
    num = (w[:, None] - w[None, :]) ** 2
    mask = denom > eig_floor
    ratio = np.zeros_like(denom)
    ratio[mask] = num[mask] / denom[mask]
    return max(2.0 * float(np.sum(ratio * np.abs(gt) ** 2)), 0.0)


# ---------------------------------------------------------------------------
# CFI

def cfi(prob, theta: float, dtheta: float = DEFAULT_DTHETA) -> float:
    """Classical Fisher information of a finite outcome distribution.

    prob: callable theta -> array of outcome probabilities (sums to 1).
    Derivatives are central differences.  Outcomes with probability below
    1e-12 contribute zero when their derivative also vanishes (the 0/0 limit
    at CFI zeros); a sizable derivative on top of a vanishing probability is
    a numerical inconsistency and raises.
    """
    if dtheta <= 0:
        raise InvalidArgumentError("dtheta must be positive")
    p0 = np.asarray(prob(theta), dtype=float)
    for p in (p0,):
        if abs(p.sum() - 1.0) > 1e-9:
            raise InvalidDistributionError(f"probabilities sum to {p.sum()}, not 1")
        if np.min(p) < -1e-12:
            raise InvalidDistributionError("negative outcome probability")
    dp = (np.asarray(prob(theta + dtheta), dtype=float)
          - np.asarray(prob(theta - dtheta), dtype=float)) / (2.0 * dtheta)
    total = 0.0
    for pk, dk in zip(p0, dp):
        if pk < CFI_PROB_FLOOR:
            if abs(dk) > CFI_DERIV_FLOOR:
                raise NumericalInstabilityError(
                    f"outcome with P={pk:.2e} has derivative {dk:.2e}")
            continue
        total += dk * dk / pk
    return max(total, 0.0)


def binary_curve(p_of_theta, thetas, dtheta: float = DEFAULT_DTHETA,
                 meta: dict | None = None) -> FisherCurve:
    """FisherCurve of a binary measurement given the scalar P(theta)."""
    thetas = np.asarray(thetas, dtype=float)
    values = np.empty_like(thetas)
    for i, t in enumerate(thetas):
        values[i] = cfi(lambda th: _binary(p_of_theta(th)), t, dtheta)
    return FisherCurve(thetas, values, meta or {})


def _binary(p: float) -> np.ndarray:
    p = min(max(float(p), 0.0), 1.0)
    return np.array([p, 1.0 - p])


# ---------------------------------------------------------------------------
# curve metrics

def mean_cfi(curve: FisherCurve, intervals) -> float:
    """Trapezoidal average of the curve over a union of theta intervals."""
    th, va = curve.thetas, curve.values
    total_len = 0.0
    total_int = 0.0
    for lo, hi in intervals:
        if hi <= lo:
            continue
        if lo < th[0] - 1e-12 or hi > th[-1] + 1e-12:
            raise InvalidArgumentError("interval outside the curve grid span")
        grid = th[(th > lo) & (th < hi)]
        pts = np.concatenate([[lo], grid, [hi]])
        vals = np.interp(pts, th, va)
        total_int += np.trapezoid(vals, pts)
        total_len += hi - lo
    if total_len == 0.0:
        raise InvalidArgumentError("empty integration range")
    return float(total_int / total_len)


def fwhm(curve: FisherCurve) -> float:
    """Width of the connected half-maximum interval around the peak."""
    th, va = curve.thetas, curve.values
    i = int(np.argmax(va))
    if i == 0 or i == va.size - 1:
        raise PeakUnresolvedError("curve maximum sits on the grid boundary")
    half = va[i] / 2.0
    if va[i] <= 0.0 or np.all(va >= half - 1e-15):
        raise PeakUnresolvedError("no strict interior peak above half maximum")

    def cross(j0, step):
        j = j0
        while 0 <= j + step < va.size and va[j + step] >= half:
            j += step
        k = j + step
        if k < 0 or k >= va.size:
            raise PeakUnresolvedError("half-maximum crossing leaves the grid")
        # linear interpolation between the last point above and first below
        t0, t1 = th[j], th[k]
        v0, v1 = va[j], va[k]
        return t0 + (half - v0) * (t1 - t0) / (v1 - v0)

    return float(cross(i, +1) - cross(i, -1))


def nge_range(curve: FisherCurve, bound: float) -> tuple:
    """Maximal intervals where the curve exceeds the bound.

    Returns (intervals, total_length); endpoints are linearly interpolated.
    """
    if bound < 0:
        raise InvalidArgumentError("bound must be >= 0")
    th, va = curve.thetas, curve.values
    above = va > bound
    intervals = []
    i = 0
    n = va.size
    while i < n:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and above[j + 1]:
            j += 1
        lo = th[i]
        if i > 0:
            lo = th[i - 1] + (bound - va[i - 1]) * (th[i] - th[i - 1]) / (va[i] - va[i - 1])
        hi = th[j]
        if j + 1 < n:
            hi = th[j] + (bound - va[j]) * (th[j + 1] - th[j]) / (va[j + 1] - va[j])
        intervals.append((float(lo), float(hi)))
        i = j + 1
    total = float(sum(hi - lo for lo, hi in intervals))
    return intervals, total
