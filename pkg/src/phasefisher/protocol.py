"""Deterministic two-Rabi-gate qubit-oscillator phase-estimation protocol.

Preparation: qubit rotation, a sigma_z-controlled displacement (entangler),
a sigma_y-controlled displacement (disentangler, strength pi/(2 alpha)), then
auxiliary frame operations that park one coherent peak at the origin.  The
probe then acquires the unknown phase (with loss/thermal noise and optional
qubit dephasing), the frame and gate sequence is inverted, and the qubit is
read out in the sigma_z (g/e) or sigma_y (+/-) basis.

Qubit basis ordering is (g, e); joint indices are q*dim + k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import channels, fock, probes
from .channels import NoiseSpec
from .errors import EstimatorUndefinedError, InvalidArgumentError
from .fisher import FisherCurve, binary_curve
from .fock import as_dim, default_dim

SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)          # g -> -1, e -> +1
SIGMA_Y = np.array([[0.0, 1j], [-1j, 0.0]])             # eigenstates (|e> +/- i|g>)/sqrt2
# reported sigma_y outcome: projector onto (|e> - i|g>)/sqrt2, the branch whose
# probability grows with theta like 1/2 + C theta
PROJ_PLUS_I = 0.5 * np.array([[1.0, -1j], [1j, 1.0]])
BASES = ("sigma_z", "sigma_y")
DEPHASING_STAGES = ("sensing", "before_readout")


@dataclass(frozen=True)
class ProtocolConfig:
    alpha: float
    phi_eps: float
    dim: int | None = None
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    basis: str = "sigma_y"
    rabi_error: float = 0.0
    dephasing_stage: str = "sensing"

    def __post_init__(self):
        if self.alpha <= 0:
            raise InvalidArgumentError("alpha must be > 0")
        if self.basis not in BASES:
            raise InvalidArgumentError(f"basis must be one of {BASES}")
        if self.dephasing_stage not in DEPHASING_STAGES:
            raise InvalidArgumentError(f"dephasing_stage must be one of {DEPHASING_STAGES}")
        if abs(self.rabi_error) > 0.1:
            raise InvalidArgumentError("|rabi_error| must be <= 0.1")

    @property
    def epsilon(self) -> float:
        return math.tan(self.phi_eps)

    def resolved_dim(self) -> int:
        return self.dim if self.dim is not None else default_dim(self.alpha)


@dataclass(frozen=True)
class ReadoutCurve:
    thetas: np.ndarray
    p_plus: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        pp = np.asarray(self.p_plus, dtype=float)
        if np.min(pp) < -1e-9 or np.max(pp) > 1.0 + 1e-9:
            raise InvalidArgumentError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "thetas", fock._freeze(th))
        object.__setattr__(self, "p_plus", fock._freeze(np.clip(pp, 0.0, 1.0)))

    def to_csv(self, header_lines=(), column: str = "p_plus") -> str:
        lines = [f"# {h}" for h in header_lines]
        lines.append(f"theta,{column}")
        lines += [f"{t:.12g},{p:.12g}" for t, p in zip(self.thetas, self.p_plus)]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# gates

def _displacement(amp: complex, dim: int) -> np.ndarray:
    return fock.gate_unitary("displace", amp, dim).mat


def qubit_rotation(chi: float) -> np.ndarray:
    """exp(i chi sigma_y): |g> -> cos chi |g> + sin chi |e>."""
    c, s = math.cos(chi), math.sin(chi)
    return np.array([[c, -s], [s, c]], dtype=complex)


def entangler(alpha: float, dim) -> np.ndarray:
    """exp[i (alpha/sqrt2) sigma_z X]: displaces by +/- i alpha/2 per qubit branch."""
    d = as_dim(dim)
    dg = _displacement(-0.5j * alpha, d)
    de = _displacement(+0.5j * alpha, d)
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = dg
    out[d:, d:] = de
    return out


def disentangler(beta: float, dim) -> np.ndarray:
    """exp[i (beta/sqrt2) sigma_y P]: displaces by -/+ beta/2 per sigma_y branch."""
    d = as_dim(dim)
    dm = _displacement(-0.5 * beta, d)
    dp = _displacement(+0.5 * beta, d)
    half_sum = 0.5 * (dm + dp)
    half_dif = 0.5 * (dm - dp)
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = half_sum
    out[:d, d:] = 1j * half_dif
    out[d:, :d] = -1j * half_dif
    out[d:, d:] = half_sum
    return out


def _kron_qubit(q2: np.ndarray, dim: int) -> np.ndarray:
    return np.kron(q2, np.eye(dim))


def _kron_osc(m: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(2), m)


def _rotation_osc(theta: float, dim: int) -> np.ndarray:
    return np.diag(np.exp(1j * theta * np.arange(dim))).astype(complex)


# ---------------------------------------------------------------------------
# engine

@dataclass(frozen=True)
class PreparationResult:
    joint: np.ndarray
    diagnostics: dict


class _Engine:
    """Precomputed circuit pieces for one configuration."""

    def __init__(self, config: ProtocolConfig):
        self.config = config
        d = config.resolved_dim()
        self.dim = d
        alpha = config.alpha
        scale = 1.0 + config.rabi_error
        beta = math.pi / (2.0 * alpha)

        ent = entangler(alpha * scale, d)
        dis = disentangler(beta * scale, d)
        chi = config.phi_eps + math.pi / 2.0
        rq = _kron_qubit(qubit_rotation(chi), d)
        aux_disp = _kron_osc(_displacement(-0.5j * alpha, d))
        aux_rot = _kron_osc(_rotation_osc(math.pi / 2.0, d))
        # the gate pair leaves the qubit near (|e> - |g>)/sqrt2; park it in the
        # ground state for the sensing interval so sigma_z dephasing acts on a
        # sigma_z eigenstate (the paper's near-ground-state idling)
        park = _kron_qubit(qubit_rotation(math.pi / 4.0), d)

        self.prep_unitary = park @ aux_rot @ aux_disp @ dis @ ent @ rq
        # inverse frame + inverse gates + qubit derotation
        self.proc_unitary = (rq.conj().T @ ent.conj().T @ dis.conj().T
                             @ aux_disp.conj().T @ aux_rot.conj().T @ park.conj().T)

        init = np.zeros(2 * d, dtype=complex)
        init[0] = 1.0
        self.prepared = self.prep_unitary @ init
        self.rho_sens = self._apply_sensing_noise(np.outer(self.prepared, self.prepared.conj()))

    def _apply_sensing_noise(self, rho: np.ndarray) -> np.ndarray:
        cfg = self.config
        noise = cfg.noise
        d = self.dim
        apply = None
        if noise.n_th > 0.0:
            kraus = channels.thermal_kraus(noise.eta, noise.n_th, d)
            apply = lambda m: channels.apply_banded_kraus(m, kraus)
        elif noise.eta < 1.0:
            kraus = channels.loss_kraus(noise.eta, d)
            apply = lambda m: channels.apply_kraus(m, kraus)
        if apply is not None:
            blocks = rho.reshape(2, d, 2, d)
            out = np.zeros_like(blocks)
            for i in range(2):
                for j in range(2):
                    out[i, :, j, :] = apply(blocks[i, :, j, :])
            rho = out.reshape(2 * d, 2 * d)
        if noise.dephasing_p > 0.0 and cfg.dephasing_stage == "sensing":
            rho = channels.qubit_dephasing_mat(rho, noise.dephasing_p)
        return rho

    def final_state(self, theta: float) -> np.ndarray:
        d = self.dim
        phases = np.exp(1j * theta * np.arange(d))
        full = np.concatenate([phases, phases])
        rho = self.rho_sens * np.outer(full, full.conj())
        rho = self.proc_unitary @ rho @ self.proc_unitary.conj().T
        if (self.config.noise.dephasing_p > 0.0
                and self.config.dephasing_stage == "before_readout"):
            rho = channels.qubit_dephasing_mat(rho, self.config.noise.dephasing_p)
        return rho

    def probability(self, theta: float) -> float:
        q = fock.qubit_marginal(self.final_state(theta))
        if self.config.basis == "sigma_z":
            return float(np.real(q[0, 0]))
        return float(np.real(np.trace(PROJ_PLUS_I @ q)))

    def preparation(self) -> PreparationResult:
        cfg = self.config
        d = self.dim
        rho = np.outer(self.prepared, self.prepared.conj())
        osc = fock.oscillator_marginal(rho)
        q = fock.qubit_marginal(rho)
        target = probes.scs(cfg.alpha, cfg.epsilon, d)
        fid = float(np.real(target.amps.conj() @ osc.mat @ target.amps))
        qubit_purity = float(np.real(np.trace(q @ q)))
        diag = {
            "scs_fidelity": fid,
            "qubit_purity": qubit_purity,
            "residual_entanglement": 1.0 - qubit_purity,
            "tail_mass": osc.tail_mass,
            "frame_ops": "displace(-i alpha/2) then rotate(pi/2), inverted in processing",
        }
        return PreparationResult(self.prepared, diag)


@lru_cache(maxsize=8)
def _engine(config: ProtocolConfig) -> _Engine:
    return _Engine(config)


# ---------------------------------------------------------------------------
# public operations

def prepare(config: ProtocolConfig) -> PreparationResult:
    return _engine(config).preparation()


def run(config: ProtocolConfig, theta: float) -> float:
    """Detection probability: P(g) for sigma_z, P(+_i) for sigma_y."""
    return _engine(config).probability(theta)


def readout_curve(config: ProtocolConfig, thetas) -> ReadoutCurve:
    eng = _engine(config)
    return ReadoutCurve(np.asarray(thetas, dtype=float),
                        [eng.probability(t) for t in np.asarray(thetas, dtype=float)])


def protocol_cfi(config: ProtocolConfig, thetas, dtheta: float = 1e-4) -> FisherCurve:
    eng = _engine(config)
    meta = {"source": "protocol", "alpha": config.alpha, "epsilon": config.epsilon,
            "basis": config.basis, "eta": config.noise.eta, "n_th": config.noise.n_th,
            "dephasing_p": config.noise.dephasing_p}
    return binary_curve(eng.probability, thetas, dtheta, meta)


def p_plus_closed_form(theta: float, alpha: float, epsilon: float, eta: float) -> float:
    """Large-alpha closed form of the matched-weight readout probability.

    Uses alpha' = alpha sqrt(eta) and the loss-coherence factor
    f = exp(-alpha^2 (1-eta)/2).  Equals the two-gate protocol's sigma_y
    readout at epsilon = 1; for general epsilon it corresponds to a projection
    whose superposition weight follows the probe (see readout_model_probability
    with weight='matched').  Validity alpha >~ 2.
    """
    a = alpha
    ap = alpha * math.sqrt(eta)
    f = math.exp(-a * a * (1.0 - eta) / 2.0)
    e = epsilon
    eit = np.exp(1j * theta)
    emt = np.exp(-1j * theta)
    terms = (
        math.exp(a * a) * e * e
        + e ** 4 * np.exp(2.0 * a * ap * math.cos(theta))
        + 1j * e ** 3 * np.exp(0.5 * a * (a + 2.0 * emt * ap))
        - 1j * e ** 3 * np.exp(0.5 * a * (a + 2.0 * eit * ap))
        + e * e * math.exp(ap * ap)
        + math.exp(a * a + ap * ap)
        + 1j * f * e * e * np.exp(0.5 * (a * a + 2.0 * a * emt * ap + ap * ap))
        + f * e ** 3 * np.exp(0.5 * ap * (ap + 2.0 * a * emt))
        + f * e ** 3 * np.exp(0.5 * ap * (ap + 2.0 * a * eit))
        - 1j * f * e * e * np.exp(0.5 * (a * a + 2.0 * a * eit * ap + ap * ap))
        + 2.0 * f * e * math.exp(a * a + 0.5 * ap * ap)
    )
    val = math.exp(-a * a - ap * ap) / (1.0 + e * e) ** 2 * float(np.real(terms))
    return min(max(val, 0.0), 1.0)


def readout_model_probability(theta: float, alpha: float, epsilon: float, eta: float,
                              dim=None, weight: str = "matched") -> float:
    """Exact Fock-space projection model behind the closed-form readout.

    The lossy, rotated probe is projected onto (|0> + i w |alpha>)/norm with
    w = epsilon ('matched', the closed form's convention) or w = 1
    ('balanced', the limit the physical sigma_y readout realizes).
    """
    d = as_dim(dim) if dim is not None else default_dim(alpha)
    psi = probes.scs(alpha, epsilon, d)
    rho = channels.apply_noise(psi.projector(), NoiseSpec(eta=eta))
    rho_t = channels.rotate_mat(rho.mat, theta)
    w = epsilon if weight == "matched" else 1.0
    m = fock.vacuum(d).amps + 1j * w * fock.coherent_state(alpha, d).amps
    m = m / np.linalg.norm(m)
    return float(np.real(m.conj() @ rho_t @ m))


# ---------------------------------------------------------------------------
# systematic-error bias

@dataclass(frozen=True)
class BiasResult:
    thetas: np.ndarray
    bias: np.ndarray
    window: tuple

    def to_csv(self, header_lines=()) -> str:
        lines = [f"# {h}" for h in header_lines]
        lines.append("theta,bias")
        lines += [f"{t:.12g},{b:.12g}" for t, b in zip(self.thetas, self.bias)]
        return "\n".join(lines) + "\n"


def _monotone_window(p_of_theta, halfwidth: float, samples: int = 241) -> tuple:
    """Largest interval around 0 on which the sampled curve is strictly monotone."""
    grid = np.linspace(-halfwidth, halfwidth, samples)
    vals = np.array([p_of_theta(t) for t in grid])
    diffs = np.diff(vals)
    mid = samples // 2
    sign = np.sign(diffs[mid])
    if sign == 0:
        raise EstimatorUndefinedError("readout curve is flat at theta = 0")
    lo = mid
    while lo > 0 and np.sign(diffs[lo - 1]) == sign:
        lo -= 1
    hi = mid
    while hi < diffs.size - 1 and np.sign(diffs[hi + 1]) == sign:
        hi += 1
    return float(grid[lo]), float(grid[hi + 1])


def bias_study(config: ProtocolConfig, thetas) -> BiasResult:
    """Estimator bias <theta - theta'> under miscalibrated gate strengths.

    theta' inverts the ideal-model (rabi_error = 0) readout curve on its
    monotone branch around zero, in the infinite-data limit.
    """
    thetas = np.asarray(thetas, dtype=float)
    ideal = _engine(replace(config, rabi_error=0.0))
    perturbed = _engine(config)
    span = max(np.max(np.abs(thetas)), 1e-3)
    window = _monotone_window(ideal.probability, 1.6 * span)
    if np.min(thetas) < window[0] or np.max(thetas) > window[1]:
        raise EstimatorUndefinedError(
            f"theta grid exceeds the monotone inversion window {window}")
    bias = np.empty_like(thetas)
    for i, t in enumerate(thetas):
        p_obs = perturbed.probability(t)
        f = lambda x: ideal.probability(x) - p_obs
        flo, fhi = f(window[0]), f(window[1])
        if flo * fhi > 0:
            raise EstimatorUndefinedError(
                f"observed probability {p_obs:.6f} not attained on the ideal branch")
        t_est = brentq(f, window[0], window[1], xtol=1e-12)
        bias[i] = t - t_est
    return BiasResult(thetas, bias, window)
