"""Probe-state constructors with their closed-form mean-quanta expressions.

Each family returns both a numerical state (truncation-checked) and exposes
the analytic average quanta number N_av of the ideal state, so tests can pit
one against the other.  N_av always refers to the prepared state before any
loss or noise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import fock
from .errors import InvalidArgumentError, InvalidDimensionError
from .fock import DensityMatrix, OscillatorState, as_dim

FAMILIES = (
    "coherent", "squeezed_vacuum", "displaced_squeezed", "fock",
    "displaced_fock", "on_state", "scs", "general_scs",
    "classical_mixture", "gaussian_mixture",
)

# sampling domains used by the randomized property tests
RANDOM_DOMAINS = {"alpha_max": 4.0, "zeta_max": 1.2, "n_max": 20}


@dataclass(frozen=True)
class ProbeSpec:
    """A probe family name plus its parameter record."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgumentError(f"unknown probe family {self.family!r}")

    def nav(self) -> float:
        return nav_closed_form(self)

    def to_config_text(self) -> str:
        payload = {"family": self.family}
        payload.update(self.params)
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_config_text(cls, text: str) -> "ProbeSpec":
        payload = json.loads(text)
        family = payload.pop("family", None)
        if family is None:
            raise InvalidArgumentError("probe config needs a 'family' key")
        return cls(family, payload)


# ---------------------------------------------------------------------------
# constructors

def scs(alpha: float, epsilon: float, dim) -> OscillatorState:
    """Vacuum/coherent superposition (|0> + eps |alpha>) / norm, alpha >= 0."""
    if alpha < 0:
        raise InvalidArgumentError("alpha is taken real >= 0 (rotate the phase out)")
    d = as_dim(dim)
    raw = fock.coherent_amplitudes(alpha, d) * epsilon
    raw[0] += 1.0
    return fock.normalized_state(raw, d)


def scs_nav(alpha: float, epsilon: float) -> float:
    a2 = alpha * alpha
    return a2 * epsilon * epsilon / (2.0 * math.exp(-a2 / 2.0) * epsilon + epsilon ** 2 + 1.0)


def scs_epsilon_for_nav(alpha: float, nav: float) -> float:
    """Positive weight eps with scs_nav(alpha, eps) == nav (requires nav < alpha^2)."""
    a2 = alpha * alpha
    if not 0.0 <= nav < a2:
        raise InvalidArgumentError(f"need 0 <= nav < alpha^2, got nav={nav}, alpha^2={a2}")
    if nav == 0.0:
        return 0.0
    g = math.exp(-a2 / 2.0)
    # nav (1 + eps^2 + 2 g eps) = a2 eps^2
    a = a2 - nav
    b = -2.0 * nav * g
    c = -nav
    return (-b + math.sqrt(b * b - 4.0 * a * c)) / (2.0 * a)


def general_scs(alpha0: float, alpha: float, epsilon: float, dim) -> OscillatorState:
    """Binary superposition N(|alpha0> + eps |alpha>) with alpha0, alpha >= 0."""
    if alpha0 < 0 or alpha < 0:
        raise InvalidArgumentError("amplitudes are taken real >= 0")
    d = as_dim(dim)
    raw = fock.coherent_amplitudes(alpha0, d) + epsilon * fock.coherent_amplitudes(alpha, d)
    return fock.normalized_state(raw, d)


def general_scs_nav(alpha0: float, alpha: float, epsilon: float) -> float:
    e = epsilon
    num = math.exp(-alpha * alpha0) * (
        math.exp((alpha ** 2 + alpha0 ** 2) / 2.0) * (alpha ** 2 * e * e + alpha0 ** 2)
        + 2.0 * math.exp(alpha * alpha0) * alpha * alpha0 * e)
    den = math.exp((alpha - alpha0) ** 2 / 2.0) * (e * e + 1.0) + 2.0 * e
    return num / den


def on_state(n: int, epsilon: float, dim) -> OscillatorState:
    """Vacuum/Fock superposition (|0> + eps |n>) / sqrt(1 + eps^2)."""
    d = as_dim(dim)
    if not 1 <= n < d:
        raise InvalidDimensionError(f"need 1 <= n < dim, got n={n}, dim={d}")
    raw = np.zeros(d, dtype=complex)
    raw[0] = 1.0
    raw[n] = epsilon
    return fock.normalized_state(raw, d)


def on_nav(n: int, epsilon: float) -> float:
    return n * epsilon ** 2 / (1.0 + epsilon ** 2)


def on_epsilon_for_nav(n: int, nav: float) -> float:
    if not 0.0 <= nav < n:
        raise InvalidArgumentError(f"need 0 <= nav < n, got nav={nav}, n={n}")
    if nav == 0.0:
        return 0.0
    return math.sqrt(nav / (n - nav))


def displaced_fock(alpha: complex, n: int, dim) -> OscillatorState:
    d = as_dim(dim)
    if not 0 <= n < d:
        raise InvalidDimensionError(f"need 0 <= n < dim, got n={n}, dim={d}")
    disp = fock.gate_unitary("displace", alpha, d)
    return fock.normalized_state(disp.mat @ fock.fock_state(n, d).amps, d)


def displaced_squeezed(alpha: complex, zeta: float, dim,
                       tail_tol: float = fock.TAIL_TOL) -> OscillatorState:
    """D[alpha] S[zeta] |0>, N_av = sinh^2 zeta + |alpha|^2.

    Built from the annihilation identity
    [(a - alpha) cosh z + (a^dag - alpha*) sinh z] |psi> = 0,
    a two-term ladder recurrence; equal (up to global phase) to applying the
    displacement and squeeze unitaries to vacuum, at O(dim) cost.
    """
    d = as_dim(dim)
    a = complex(alpha)
    ch, sh = math.cosh(zeta), math.sinh(zeta)
    c = np.zeros(d, dtype=complex)
    c[0] = 1.0
    drive = a * ch + np.conj(a) * sh
    for n in range(d - 1):
        prev = c[n - 1] if n >= 1 else 0.0
        c[n + 1] = (drive * c[n] - math.sqrt(n) * sh * prev) / (ch * math.sqrt(n + 1))
    return fock.normalized_state(c, d, tail_tol)


def squeezed_vacuum(zeta: float, dim, tail_tol: float = fock.TAIL_TOL) -> OscillatorState:
    return displaced_squeezed(0.0, zeta, dim, tail_tol)


def zeta_for_nav(nav: float) -> float:
    return math.asinh(math.sqrt(nav))


def classical_mixture(p: float, alpha: float, dim) -> DensityMatrix:
    """p |0><0| + (1-p) |alpha><alpha|; N_av = (1-p) |alpha|^2."""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"p must be in [0, 1], got {p}")
    d = as_dim(dim)
    vac = fock.vacuum(d).projector().mat
    coh = fock.coherent_state(alpha, d).projector().mat
    return DensityMatrix(p * vac + (1.0 - p) * coh, d)


def gaussian_mixture(p: float, g1: tuple, g2: tuple, dim) -> DensityMatrix:
    """p rho1 + (1-p) rho2 for displaced-squeezed components (alpha, zeta)."""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"p must be in [0, 1], got {p}")
    d = as_dim(dim)
    r1 = displaced_squeezed(g1[0], g1[1], d).projector().mat
    r2 = displaced_squeezed(g2[0], g2[1], d).projector().mat
    return DensityMatrix(p * r1 + (1.0 - p) * r2, d)


def purity(rho: DensityMatrix) -> float:
    return float(np.sum(np.abs(rho.mat) ** 2))


# ---------------------------------------------------------------------------
# spec dispatch

def nav_closed_form(spec: ProbeSpec) -> float:
    p = spec.params
    fam = spec.family
    if fam == "coherent":
        return abs(p["alpha"]) ** 2
    if fam == "squeezed_vacuum":
        return math.sinh(abs(p["zeta"])) ** 2
    if fam == "displaced_squeezed":
        return math.sinh(abs(p["zeta"])) ** 2 + abs(p["alpha"]) ** 2
    if fam == "fock":
        return float(p["n"])
    if fam == "displaced_fock":
        return p["n"] + abs(p["alpha"]) ** 2
    if fam == "on_state":
        return on_nav(p["n"], p["epsilon"])
    if fam == "scs":
        return scs_nav(p["alpha"], p["epsilon"])
    if fam == "general_scs":
        return general_scs_nav(p["alpha0"], p["alpha"], p["epsilon"])
    if fam == "classical_mixture":
        return (1.0 - p["p"]) * abs(p["alpha"]) ** 2
    if fam == "gaussian_mixture":
        n1 = math.sinh(abs(p["zeta1"])) ** 2 + abs(p["alpha1"]) ** 2
        n2 = math.sinh(abs(p["zeta2"])) ** 2 + abs(p["alpha2"]) ** 2
        return p["p"] * n1 + (1.0 - p["p"]) * n2
    raise InvalidArgumentError(f"unknown probe family {fam!r}")


def build(spec: ProbeSpec, dim):
    """Construct the state (pure families) or density matrix (mixtures)."""
    p = spec.params
    fam = spec.family
    d = as_dim(dim)
    if fam == "coherent":
        return fock.coherent_state(p["alpha"], d)
    if fam == "squeezed_vacuum":
        return squeezed_vacuum(p["zeta"], d)
    if fam == "displaced_squeezed":
        return displaced_squeezed(p["alpha"], p["zeta"], d)
    if fam == "fock":
        return fock.fock_state(p["n"], d)
    if fam == "displaced_fock":
        return displaced_fock(p["alpha"], p["n"], d)
    if fam == "on_state":
        return on_state(p["n"], p["epsilon"], d)
    if fam == "scs":
        return scs(p["alpha"], p["epsilon"], d)
    if fam == "general_scs":
        return general_scs(p["alpha0"], p["alpha"], p["epsilon"], d)
    if fam == "classical_mixture":
        return classical_mixture(p["p"], p["alpha"], d)
    if fam == "gaussian_mixture":
        return gaussian_mixture(p["p"], (p["alpha1"], p["zeta1"]),
                                (p["alpha2"], p["zeta2"]), d)
    raise InvalidArgumentError(f"unknown probe family {fam!r}")


def recommended_dim(spec: ProbeSpec) -> int:
    """Truncation large enough for the family's reach."""
    p = spec.params
    fam = spec.family
    if fam in ("coherent", "scs"):
        return fock.default_dim(p["alpha"])
    if fam == "general_scs":
        return fock.default_dim(max(p["alpha"], p["alpha0"]))
    if fam in ("squeezed_vacuum", "displaced_squeezed"):
        zeta = abs(p.get("zeta", 0.0))
        # squeezed tails decay like tanh^{2k}(zeta) per photon pair
        levels = 0 if zeta == 0 else int(math.ceil(-38.0 / math.log(math.tanh(zeta) ** 2)))
        return fock.default_dim(p.get("alpha", 0.0)) + levels + 20
    if fam == "fock":
        return max(p["n"] + 10, 2)
    if fam == "displaced_fock":
        return fock.default_dim(abs(p["alpha"]) + math.sqrt(p["n"] + 1.0))
    if fam == "on_state":
        return p["n"] + 4
    if fam == "classical_mixture":
        return fock.default_dim(p["alpha"])
    if fam == "gaussian_mixture":
        reach = max(abs(p["alpha1"]) + abs(p["zeta1"]) * 3.0,
                    abs(p["alpha2"]) + abs(p["zeta2"]) * 3.0)
        return fock.default_dim(reach)
    raise InvalidArgumentError(f"unknown probe family {fam!r}")
