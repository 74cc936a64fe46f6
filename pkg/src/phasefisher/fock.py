"""Truncated-Fock-space kernel: operators, elementary states, fidelity, moments.

Everything lives in a hard-truncated basis |0>, ..., |dim-1>.  Constructors
check how much probability sits in the top two levels and fail hard when the
truncation is too tight, so downstream results are never silently contaminated
by edge effects.  All values are immutable after construction; every operation
here is a pure function.

Conventions: X = (a + a^dag)/sqrt(2), P = i(a^dag - a)/sqrt(2), so a
controlled exp[i (alpha/sqrt(2)) sigma_z X] displaces the oscillator by
+/- i alpha/2.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import (
    InvalidArgumentError,
    InvalidDimensionError,
    InvalidStateError,
    ResourceLimitError,
    TruncationError,
)

TAIL_TOL = 1e-8        # max probability allowed in the top two Fock levels
NORM_TOL = 1e-10
HERM_TOL = 1e-10
POSITIVITY_TOL = 1e-9  # most-negative eigenvalue tolerated in a density matrix
EIG_FLOOR = 1e-12      # eigenvalue floor applied before matrix square roots
TENSOR_DIM_CAP = 4096  # guard for qubit (x) oscillator compositions
LOG_FACTORIAL_SWITCH = 150


@dataclass(frozen=True)
class FockDim:
    """Truncated basis size; Fock levels 0..dim-1."""

    dim: int

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 2:
            raise InvalidDimensionError(
                f"Fock dimension must be an integer >= 2, got {self.dim!r}")


def as_dim(dim) -> int:
    """Coerce an int or FockDim to a validated plain int."""
    if isinstance(dim, FockDim):
        return dim.dim
    try:
        d = operator.index(dim)
    except TypeError as exc:
        raise InvalidDimensionError(f"not a Fock dimension: {dim!r}") from exc
    FockDim(d)
    return d


def default_dim(alpha_max) -> int:
    """Truncation rule ceil(|a|^2 + 6|a| + 10) for a maximum amplitude."""
    a = abs(alpha_max)
    return int(math.ceil(a * a + 6.0 * a + 10.0))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OscillatorState:
    """Normalized amplitude vector in the truncated Fock basis."""

    amps: np.ndarray
    dim: int

    def __post_init__(self):
        d = as_dim(self.dim)
        object.__setattr__(self, "dim", d)
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (d,):
            raise InvalidStateError(f"amplitude vector has shape {amps.shape}, expected ({d},)")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state norm {norm} deviates from 1 beyond {NORM_TOL}")
        object.__setattr__(self, "amps", _freeze(amps))

    @property
    def tail_mass(self) -> float:
        """Probability in the top two Fock levels."""
        return float(np.sum(np.abs(self.amps[-2:]) ** 2))

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amps, self.amps.conj()), self.dim)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, (numerically) positive matrix in the Fock basis."""

    mat: np.ndarray
    dim: int

    def __post_init__(self):
        d = as_dim(self.dim)
        object.__setattr__(self, "dim", d)
        mat = np.asarray(self.mat, dtype=complex)
        if mat.shape != (d, d):
            raise InvalidStateError(f"matrix has shape {mat.shape}, expected ({d}, {d})")
        if np.max(np.abs(mat - mat.conj().T)) > HERM_TOL:
            raise InvalidStateError("density matrix is not Hermitian within tolerance")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > HERM_TOL:
            raise InvalidStateError(f"trace {tr} deviates from 1 beyond {HERM_TOL}")
        min_eig = float(np.linalg.eigvalsh(mat)[0])
        if min_eig < -POSITIVITY_TOL:
            raise InvalidStateError(f"minimum eigenvalue {min_eig} below -{POSITIVITY_TOL}")
        object.__setattr__(self, "mat", _freeze(mat))

    @property
    def tail_mass(self) -> float:
        return float(np.sum(np.diag(self.mat)[-2:].real))


@dataclass(frozen=True)
class OperatorMatrix:
    """A dim x dim operator with a label recording what it is."""

    mat: np.ndarray
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "mat", _freeze(np.asarray(self.mat, dtype=complex)))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


def as_density(state) -> DensityMatrix:
    """Promote an OscillatorState (or pass through a DensityMatrix)."""
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, OscillatorState):
        return state.projector()
    raise InvalidArgumentError(f"expected a state, got {type(state).__name__}")


def check_same_dim(*objs) -> int:
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise InvalidDimensionError(f"mismatched Fock dimensions: {sorted(dims)}")
    return dims.pop()


# ---------------------------------------------------------------------------
# operators

def annihilation(dim) -> np.ndarray:
    d = as_dim(dim)
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1).astype(complex)


def number_op(dim) -> np.ndarray:
    d = as_dim(dim)
    return np.diag(np.arange(d, dtype=float)).astype(complex)


def oscillator_operators(dim) -> dict:
    """Ladder and quadrature operators {a, adag, n, x, p}."""
    d = as_dim(dim)
    a = annihilation(d)
    ad = a.conj().T
    ops = {
        "a": OperatorMatrix(a, "annihilation"),
        "adag": OperatorMatrix(ad, "creation"),
        "n": OperatorMatrix(ad @ a, "number"),
        "x": OperatorMatrix((a + ad) / math.sqrt(2.0), "quadX"),
        "p": OperatorMatrix(1j * (ad - a) / math.sqrt(2.0), "quadP"),
    }
    return ops


def _log_factorials(dim: int) -> np.ndarray:
    # running sum in log space; exact enough for k <= LOG_FACTORIAL_SWITCH anyway
    return np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, dim, dtype=float)))])


# ---------------------------------------------------------------------------
# elementary states

def fock_state(n: int, dim) -> OscillatorState:
    d = as_dim(dim)
    if not 0 <= n < d:
        raise InvalidDimensionError(f"Fock level {n} outside basis of size {d}")
    amps = np.zeros(d, dtype=complex)
    amps[n] = 1.0
    return OscillatorState(amps, d)


def vacuum(dim) -> OscillatorState:
    return fock_state(0, dim)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Unnormalized truncated coherent amplitudes e^{-|a|^2/2} a^k / sqrt(k!)."""
    d = as_dim(dim)
    k = np.arange(d, dtype=float)
    r = abs(alpha)
    if r == 0.0:
        amps = np.zeros(d, dtype=complex)
        amps[0] = 1.0
        return amps
    log_mag = k * math.log(r) - 0.5 * _log_factorials(d) - 0.5 * r * r
    return np.exp(log_mag) * np.exp(1j * k * np.angle(alpha))


def coherent_state(alpha: complex, dim, tail_tol: float = TAIL_TOL) -> OscillatorState:
    d = as_dim(dim)
    amps = coherent_amplitudes(alpha, d)
    tail = float(np.sum(np.abs(amps[-2:]) ** 2))
    if tail > tail_tol:
        raise TruncationError(
            f"coherent state |alpha|={abs(alpha):.3g} needs dim > "
            f"{default_dim(alpha)}; tail mass {tail:.3e} at dim {d}",
            tail_mass=tail)
    return OscillatorState(amps / np.linalg.norm(amps), d)


def normalized_state(raw_amps, dim=None, tail_tol: float = TAIL_TOL) -> OscillatorState:
    """Normalize a raw amplitude vector, enforcing the tail criterion."""
    amps = np.asarray(raw_amps, dtype=complex)
    d = as_dim(dim) if dim is not None else amps.size
    nrm = np.linalg.norm(amps)
    if nrm == 0.0:
        raise InvalidStateError("cannot normalize the zero vector")
    amps = amps / nrm
    tail = float(np.sum(np.abs(amps[-2:]) ** 2))
    if tail > tail_tol:
        raise TruncationError(f"tail mass {tail:.3e} exceeds {tail_tol:.1e} at dim {d}",
                              tail_mass=tail)
    return OscillatorState(amps, d)


# ---------------------------------------------------------------------------
# gates

def gate_unitary(kind: str, param: complex, dim) -> OperatorMatrix:
    """Displacement, squeezing, or rotation unitary.

    displace: exp(alpha a^dag - alpha* a)
    squeeze:  exp(-(zeta/2) a^dag^2 + (zeta*/2) a^2)
    rotate:   exp(i theta n), exactly diagonal
    """
    d = as_dim(dim)
    if kind == "rotate":
        theta = complex(param)
        if abs(theta.imag) > 0:
            raise InvalidArgumentError("rotation angle must be real")
        return OperatorMatrix(np.diag(np.exp(1j * theta.real * np.arange(d))), "unitary")
    a = annihilation(d)
    ad = a.conj().T
    if kind == "displace":
        alpha = complex(param)
        gen = alpha * ad - np.conj(alpha) * a
    elif kind == "squeeze":
        zeta = complex(param)
        gen = -(zeta / 2.0) * (ad @ ad) + (np.conj(zeta) / 2.0) * (a @ a)
        if math.sinh(abs(zeta)) ** 2 + 6.0 * math.sinh(abs(zeta)) + 10.0 > d:
            raise TruncationError(
                f"squeeze |zeta|={abs(zeta):.3g} needs a larger basis than dim {d}")
    else:
        raise InvalidArgumentError(f"unknown gate kind {kind!r}")
    return OperatorMatrix(expm(gen), "unitary")


def apply_unitary(u: OperatorMatrix, state):
    if isinstance(state, OscillatorState):
        return OscillatorState(u.mat @ state.amps, state.dim)
    rho = as_density(state)
    return DensityMatrix(u.mat @ rho.mat @ u.mat.conj().T, rho.dim)


# ---------------------------------------------------------------------------
# fidelity and moments

def herm_sqrt(mat: np.ndarray, floor: float = EIG_FLOOR) -> np.ndarray:
    """Square root of a Hermitian PSD matrix.

    Eigenvalues below the floor are treated as exact zeros; raising them to a
    positive value instead would inject ~sqrt(floor) of spurious amplitude per
    zero mode, which is fatal for fidelities of nearly pure states.
    """
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    w = np.sqrt(np.where(w < floor, 0.0, w))
    return (v * w) @ v.conj().T


def uhlmann_fidelity(rho, sigma) -> float:
    """(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clipped to [0, 1]."""
    r = as_density(rho)
    s = as_density(sigma)
    check_same_dim(r, s)
    return fidelity_mats(r.mat, s.mat)


def fidelity_mats(rmat: np.ndarray, smat: np.ndarray) -> float:
    """Uhlmann fidelity on raw matrices (no validation); used in hot loops.

    Computed as the squared nuclear norm of sqrt(rho) sqrt(sigma): the trace
    of sqrt(sqrt(rho) sigma sqrt(rho)) equals the singular-value sum, and the
    SVD route avoids the sqrt-of-eigenvalue noise amplification that ruins
    fidelities of nearly identical states.
    """
    m = herm_sqrt(rmat) @ herm_sqrt(smat)
    sv = np.linalg.svd(m, compute_uv=False)
    return min(max(float(np.sum(sv) ** 2), 0.0), 1.0)


def overlap(psi: OscillatorState, phi: OscillatorState) -> complex:
    check_same_dim(psi, phi)
    return complex(np.vdot(psi.amps, phi.amps))


def expectation(op_mat: np.ndarray, state) -> float:
    if isinstance(state, OscillatorState):
        return float(np.real(np.vdot(state.amps, op_mat @ state.amps)))
    rho = as_density(state)
    return float(np.real(np.trace(op_mat @ rho.mat)))


def mean_photon(state) -> float:
    if isinstance(state, OscillatorState):
        return float(np.sum(np.arange(state.dim) * np.abs(state.amps) ** 2))
    rho = as_density(state)
    return float(np.real(np.sum(np.arange(rho.dim) * np.diag(rho.mat))))


def photon_variance(state) -> float:
    # n and n^2 are diagonal, so the Fock populations suffice for any state
    if isinstance(state, OscillatorState):
        p = np.abs(state.amps) ** 2
    else:
        p = np.diag(as_density(state).mat).real
    n = np.arange(p.size)
    mean = float(np.sum(n * p))
    return float(np.sum(n * n * p)) - mean * mean


# ---------------------------------------------------------------------------
# qubit (x) oscillator composition

def tensor_qubit(qubit, osc):
    """Kronecker composition; qubit index is the slow axis (q*dim + k)."""
    q = np.asarray(qubit, dtype=complex)
    if isinstance(osc, OscillatorState) and q.shape == (2,):
        d = osc.dim
        if 2 * d > TENSOR_DIM_CAP:
            raise ResourceLimitError(f"joint dimension {2 * d} above cap {TENSOR_DIM_CAP}")
        return np.kron(q, osc.amps)
    if q.shape == (2,):
        q = np.outer(q, q.conj())
    if q.shape != (2, 2):
        raise InvalidArgumentError("qubit part must be a 2-vector or a 2x2 matrix")
    rho = as_density(osc)
    if 2 * rho.dim > TENSOR_DIM_CAP:
        raise ResourceLimitError(f"joint dimension {2 * rho.dim} above cap {TENSOR_DIM_CAP}")
    return np.kron(q, rho.mat)


def qubit_marginal(joint: np.ndarray) -> np.ndarray:
    """Partial trace over the oscillator of a (2d x 2d) joint density matrix."""
    n = joint.shape[0]
    d = n // 2
    blocks = joint.reshape(2, d, 2, d)
    return np.trace(blocks, axis1=1, axis2=3)


def oscillator_marginal(joint: np.ndarray) -> DensityMatrix:
    """Partial trace over the qubit of a (2d x 2d) joint density matrix."""
    n = joint.shape[0]
    d = n // 2
    blocks = joint.reshape(2, d, 2, d)
    return DensityMatrix(blocks[0, :, 0, :] + blocks[1, :, 1, :], d)
