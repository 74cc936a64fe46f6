"""CPTP maps: bosonic loss, thermal noise, phase rotation, qubit dephasing.

The loss channel uses the Kraus decomposition
K_l = sqrt((1-eta)^l / l!) eta^{n/2} a^l, which is exact in the truncated
space.  The thermal channel is realized by dilation: a beamsplitter of
transmissivity eta couples the signal to an environment mode prepared in a
thermal state, and the environment is traced out.  Loss, thermal noise and
phase rotation are all phase-insensitive, so they commute and their order of
application does not matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import fock
from .errors import InvalidArgumentError, TruncationError
from .fock import DensityMatrix, as_dim, as_density

THERMAL_TAIL_TOL = 1e-8


@dataclass(frozen=True)
class NoiseSpec:
    """Channel parameters: transmission eta, thermal occupation, qubit dephasing."""

    eta: float = 1.0
    n_th: float = 0.0
    dephasing_p: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise InvalidArgumentError(f"eta must be in (0, 1], got {self.eta}")
        if self.n_th < 0.0:
            raise InvalidArgumentError(f"n_th must be >= 0, got {self.n_th}")
        if not 0.0 <= self.dephasing_p <= 1.0:
            raise InvalidArgumentError(f"dephasing_p must be in [0, 1], got {self.dephasing_p}")

    @property
    def is_ideal(self) -> bool:
        return self.eta == 1.0 and self.n_th == 0.0 and self.dephasing_p == 0.0


@lru_cache(maxsize=32)
def loss_kraus(eta: float, dim: int) -> tuple:
    """Kraus operators of the pure-loss channel, exact in the truncated space."""
    d = as_dim(dim)
    a = fock.annihilation(d)
    half = eta ** (np.arange(d) / 2.0)
    ops = []
    a_l = np.eye(d, dtype=complex)
    log_1me = math.log(1.0 - eta) if eta < 1.0 else -math.inf
    for l in range(d):
        if l == 0:
            coef = 1.0
        elif eta == 1.0:
            break
        else:
            coef = math.exp(0.5 * (l * log_1me - math.lgamma(l + 1)))
        ops.append(coef * (half[:, None] * a_l))
        a_l = a @ a_l
    return tuple(fock._freeze(k) for k in ops)


def apply_kraus(mat: np.ndarray, kraus) -> np.ndarray:
    out = np.zeros_like(mat)
    for k in kraus:
        out += k @ mat @ k.conj().T
    return out


def loss_channel(rho, eta: float) -> DensityMatrix:
    if not 0.0 < eta <= 1.0:
        raise InvalidArgumentError(f"eta must be in (0, 1], got {eta}")
    r = as_density(rho)
    if eta == 1.0:
        return r
    out = apply_kraus(r.mat, loss_kraus(float(eta), r.dim))
    return DensityMatrix(out, r.dim)


def thermal_env_dim(n_th: float) -> int:
    return max(2, int(math.ceil(10.0 * (n_th + 1.0))))


def thermal_populations(n_th: float, env_dim: int) -> np.ndarray:
    if n_th == 0.0:
        p = np.zeros(env_dim)
        p[0] = 1.0
        return p
    ratio = n_th / (1.0 + n_th)
    p = ratio ** np.arange(env_dim) / (1.0 + n_th)
    tail = ratio ** env_dim
    if tail > THERMAL_TAIL_TOL:
        raise TruncationError(
            f"thermal environment tail {tail:.2e} exceeds {THERMAL_TAIL_TOL:.0e} "
            f"at env_dim {env_dim}", tail_mass=tail)
    return p


@lru_cache(maxsize=16)
def thermal_kraus(eta: float, n_th: float, dim: int, env_dim: int | None = None) -> tuple:
    """Banded Kraus set of the thermal-loss channel from its dilation.

    The beamsplitter coupling the signal to the thermal environment conserves
    total photon number, so its unitary is assembled block by block (one small
    tridiagonal generator per total-number sector).  Each Kraus operator
    K_{k,l} shifts the signal Fock index by l - k; it is returned as
    (shift, v) with K[n + shift, n] = v[n].  Exact for any input supported on
    the truncated signal space, up to the thermal-population tail.
    """
    d = as_dim(dim)
    lmax = thermal_env_dim(n_th) if env_dim is None else env_dim
    p_env = thermal_populations(n_th, lmax)
    theta = math.acos(math.sqrt(eta))
    # block unitaries U_M over env quanta k = 0..M for total number M
    m_top = d - 1 + lmax
    blocks = []
    for m in range(m_top + 1):
        k = np.arange(1, m + 1, dtype=float)
        coup = theta * np.sqrt(k * (m - k + 1.0))
        h = np.zeros((m + 1, m + 1))
        h[np.arange(m), np.arange(1, m + 1)] = coup       # a^dag b part
        gen = h - h.T                                     # theta (a^dag b - a b^dag)
        w, v = np.linalg.eigh(1j * gen)
        blocks.append((v * np.exp(-1j * w)) @ v.conj().T)
    ops = []
    for l in range(lmax):
        if p_env[l] <= 0.0:
            continue
        sqp = math.sqrt(p_env[l])
        for k in range(d - 1 + l + 1):
            shift = l - k
            v = np.zeros(d, dtype=complex)
            for n_in in range(d):
                m = n_in + l
                if 0 <= k <= m and 0 <= n_in + shift < d:
                    v[n_in] = sqp * blocks[m][k, l]
            if np.max(np.abs(v)) > 1e-14:
                ops.append((shift, fock._freeze(v)))
    return tuple(ops)


def apply_banded_kraus(mat: np.ndarray, bands) -> np.ndarray:
    """Apply shift-banded Kraus operators (shift, v): K[n+shift, n] = v[n]."""
    d = mat.shape[0]
    out = np.zeros_like(mat)
    for shift, v in bands:
        n0 = max(0, -shift)
        n1 = min(d - 1, d - 1 - shift)
        if n1 < n0:
            continue
        seg = v[n0:n1 + 1]
        sub = mat[n0:n1 + 1, n0:n1 + 1]
        out[n0 + shift:n1 + shift + 1, n0 + shift:n1 + shift + 1] += \
            seg[:, None] * sub * seg.conj()[None, :]
    return out


def thermal_loss_channel(rho, eta: float, n_th: float, env_dim: int | None = None,
                         trace_tol: float = 1e-9) -> DensityMatrix:
    """Thermal-loss channel; trace_tol bounds the tolerated truncation leakage.

    Inputs honouring the 1e-8 tail discipline keep their trace within 1e-9;
    states intentionally carried at tighter dims (fat tails) need a looser
    trace_tol, at a documented accuracy cost.
    """
    if not 0.0 < eta <= 1.0:
        raise InvalidArgumentError(f"eta must be in (0, 1], got {eta}")
    if n_th < 0.0:
        raise InvalidArgumentError(f"n_th must be >= 0, got {n_th}")
    r = as_density(rho)
    if n_th == 0.0:
        return loss_channel(r, eta)
    out = apply_banded_kraus(r.mat, thermal_kraus(float(eta), float(n_th), r.dim, env_dim))
    tr = float(np.trace(out).real)
    if abs(tr - 1.0) > trace_tol:
        raise TruncationError(
            f"thermal channel lost {abs(tr - 1.0):.2e} of trace; enlarge the basis")
    # thermal photons pushing tail weight past the truncation cost O(1e-10)
    # of trace; rescale the numerical residue
    return DensityMatrix(out / tr, r.dim)


def rotate_mat(mat: np.ndarray, theta: float) -> np.ndarray:
    phases = np.exp(1j * theta * np.arange(mat.shape[0]))
    return mat * np.outer(phases, phases.conj())


def phase_rotation(rho, theta: float) -> DensityMatrix:
    """exp(i theta n) rho exp(-i theta n); exact diagonal conjugation."""
    r = as_density(rho)
    return DensityMatrix(rotate_mat(r.mat, float(theta)), r.dim)


def apply_noise(rho, noise: NoiseSpec) -> DensityMatrix:
    """Loss or thermal-loss part of a NoiseSpec on an oscillator state."""
    r = as_density(rho)
    if noise.n_th > 0.0:
        return thermal_loss_channel(r, noise.eta, noise.n_th)
    if noise.eta < 1.0:
        return loss_channel(r, noise.eta)
    return r


def qubit_dephasing_mat(joint: np.ndarray, p: float) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"dephasing probability must be in [0, 1], got {p}")
    n = joint.shape[0]
    d = n // 2
    out = joint.copy()
    # sigma_z flip with probability p scales the qubit coherences by (1 - 2p)
    out[:d, d:] *= 1.0 - 2.0 * p
    out[d:, :d] *= 1.0 - 2.0 * p
    return out


def qubit_dephasing(joint: np.ndarray, p: float) -> np.ndarray:
    """(1-p) rho + p (sigma_z x I) rho (sigma_z x I) on a 2d x 2d joint state."""
    return qubit_dephasing_mat(np.asarray(joint, dtype=complex), p)
