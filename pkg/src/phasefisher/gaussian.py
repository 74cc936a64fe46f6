"""Single-mode Gaussian states in the covariance-matrix picture.

Convention: vacuum covariance = identity (thermal covariance (2 n_th + 1) I),
displacement vector d = (sqrt(2) Re alpha, sqrt(2) Im alpha).  This is an
independent computational path that the Fock-space engine is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, InvalidStateError, NumericalInstabilityError

OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])
PHYSICALITY_TOL = 1e-9


@dataclass(frozen=True)
class GaussianState:
    cov: np.ndarray
    disp: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        disp = np.asarray(self.disp, dtype=float)
        if cov.shape != (2, 2) or disp.shape != (2,):
            raise InvalidStateError("cov must be 2x2 and disp length 2")
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12:
            raise InvalidStateError("covariance matrix must be symmetric")
        # physicality: cov + i Omega >= 0
        w = np.linalg.eigvalsh(cov.astype(complex) + 1j * OMEGA)
        if w[0] < -PHYSICALITY_TOL:
            raise InvalidStateError(f"unphysical covariance, min eig {w[0]:.3e}")
        cov.setflags(write=False)
        disp.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "disp", disp)


def vacuum() -> GaussianState:
    return GaussianState(np.eye(2), np.zeros(2))


def cm_displaced_squeezed(alpha: complex, zeta: float) -> GaussianState:
    """Displaced squeezed state: cov diag(e^-2z, e^2z), disp sqrt(2)(Re a, Im a)."""
    cov = np.diag([math.exp(-2.0 * zeta), math.exp(2.0 * zeta)])
    a = complex(alpha)
    disp = math.sqrt(2.0) * np.array([a.real, a.imag])
    return GaussianState(cov, disp)


def cm_mean_photon(g: GaussianState) -> float:
    return float((np.trace(g.cov) - 2.0) / 4.0 + np.dot(g.disp, g.disp) / 2.0)


def cm_loss(g: GaussianState, eta: float, n_th: float = 0.0) -> GaussianState:
    """V -> eta V + (1-eta)(2 n_th + 1) I, d -> sqrt(eta) d."""
    if not 0.0 < eta <= 1.0:
        raise InvalidArgumentError(f"eta must be in (0, 1], got {eta}")
    if n_th < 0.0:
        raise InvalidArgumentError(f"n_th must be >= 0, got {n_th}")
    cov = eta * g.cov + (1.0 - eta) * (2.0 * n_th + 1.0) * np.eye(2)
    return GaussianState(cov, math.sqrt(eta) * g.disp)


def cm_rotate(g: GaussianState, theta: float) -> GaussianState:
    c, s = math.cos(theta), math.sin(theta)
    r = np.array([[c, s], [-s, c]])
    return GaussianState(r @ g.cov @ r.T, r @ g.disp)


def cm_fidelity(g1: GaussianState, g2: GaussianState) -> float:
    """Uhlmann fidelity of two single-mode Gaussian states.

    Zero-displacement part 2/(sqrt(Delta + Lambda) - sqrt(Lambda)) with
    Delta = det(V1 + V2) and Lambda = (det V1 - 1)(det V2 - 1), times the
    displacement factor exp(-dd^T (V1 + V2)^{-1} dd).
    """
    v1, v2 = g1.cov, g2.cov
    delta = float(np.linalg.det(v1 + v2))
    lam = float((np.linalg.det(v1) - 1.0) * (np.linalg.det(v2) - 1.0))
    if lam < -1e-9:
        raise NumericalInstabilityError(f"negative Lambda = {lam:.3e} in Gaussian fidelity")
    lam = max(lam, 0.0)
    base = 2.0 / (math.sqrt(delta + lam) - math.sqrt(lam))
    dd = g2.disp - g1.disp
    shift = float(dd @ np.linalg.solve(v1 + v2, dd))
    return min(base * math.exp(-shift), 1.0)


def cm_overlap(g1: GaussianState, g2: GaussianState) -> float:
    """Hilbert-Schmidt overlap tr(rho1 rho2); equals fidelity when one is pure."""
    v = g1.cov + g2.cov
    dd = g2.disp - g1.disp
    shift = float(dd @ np.linalg.solve(v, dd))
    return 2.0 / math.sqrt(np.linalg.det(v)) * math.exp(-shift)


def cm_qfi(g: GaussianState, eta: float = 1.0, n_th: float = 0.0,
           dtheta: float = 1e-3) -> float:
    """Phase-rotation QFI of the state after loss, via the fidelity difference.

    Richardson-extrapolated over {dtheta, dtheta/2}, like the Fock-space path.
    """
    lossy = cm_loss(g, eta, n_th)

    def estimate(h):
        rot = cm_rotate(lossy, h)
        return 4.0 * (1.0 - cm_fidelity(lossy, rot)) / (h * h)

    e1 = estimate(dtheta)
    e2 = estimate(dtheta / 2.0)
    return max((4.0 * e2 - e1) / 3.0, 0.0)


def cm_binary_cfi(nav: float, eta: float, theta: float, dtheta: float = 1e-6) -> float:
    """Binary CFI of a lossy squeezed vacuum projected onto itself (CM route)."""
    zeta = math.asinh(math.sqrt(nav))
    probe = cm_displaced_squeezed(0.0, zeta)
    lossy = cm_loss(probe, eta)

    def p(th):
        return cm_overlap(probe, cm_rotate(lossy, th))

    p0 = p(theta)
    if not 0.0 < p0 < 1.0:
        return 0.0
    dp = (p(theta + dtheta) - p(theta - dtheta)) / (2.0 * dtheta)
    return dp * dp / (p0 * (1.0 - p0))
