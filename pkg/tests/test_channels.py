import math

import numpy as np
import pytest

from phasefisher import channels, fock, probes
from phasefisher.channels import NoiseSpec
from phasefisher.errors import InvalidArgumentError, TruncationError

from conftest import random_density


def test_noise_spec_validation():
    assert NoiseSpec().is_ideal
    with pytest.raises(InvalidArgumentError):
        NoiseSpec(eta=0.0)
    with pytest.raises(InvalidArgumentError):
        NoiseSpec(n_th=-0.1)
    with pytest.raises(InvalidArgumentError):
        NoiseSpec(dephasing_p=1.5)


def test_loss_identity_at_unit_eta(rng):
    rho = random_density(rng, 15)
    out = channels.loss_channel(rho, 1.0)
    assert np.max(np.abs(out.mat - rho.mat)) == 0.0


def test_loss_coherent_closure():
    d = 40
    rho = fock.coherent_state(2.0, d).projector()
    out = channels.loss_channel(rho, 0.64)
    tgt = fock.coherent_state(1.6, d).projector()
    assert np.max(np.abs(out.mat - tgt.mat)) < 1e-8
    assert abs(np.trace(out.mat).real - 1.0) < 1e-10


def test_loss_coherence_factor():
    # the |alpha><0| block of a superposition picks up e^{-alpha^2(1-eta)/2}
    d, alpha, eta = 40, 2.0, 0.8
    coh = fock.coherent_state(alpha, d).amps
    vac = fock.vacuum(d).amps
    block = np.outer(coh, vac.conj())
    out = channels.apply_kraus(block, channels.loss_kraus(eta, d))
    expected = (math.exp(-alpha ** 2 * (1 - eta) / 2.0)
                * np.outer(fock.coherent_state(math.sqrt(eta) * alpha, d).amps, vac.conj()))
    assert np.max(np.abs(out - expected)) < 1e-9


def test_loss_eta_range():
    with pytest.raises(InvalidArgumentError):
        channels.loss_channel(fock.vacuum(10).projector(), 0.0)


def test_thermal_reduces_to_loss(rng):
    for _ in range(3):
        rho = random_density(rng, 20)
        a = channels.thermal_loss_channel(rho, 0.85, 0.0)
        b = channels.loss_channel(rho, 0.85)
        assert np.max(np.abs(a.mat - b.mat)) < 1e-9


def test_thermal_mean_photon_on_vacuum():
    out = channels.thermal_loss_channel(fock.vacuum(40).projector(), 0.9, 0.1)
    assert abs(fock.mean_photon(out) - 0.01) < 1e-6
    assert abs(np.trace(out.mat).real - 1.0) < 1e-9


def test_thermal_full_swap_limit():
    # eta -> 0: output approaches the thermal state of the environment
    out = channels.thermal_loss_channel(fock.vacuum(40).projector(), 1e-8, 0.1)
    pops = np.diag(out.mat).real
    ratio = 0.1 / 1.1
    expected = ratio ** np.arange(40) / 1.1
    assert np.max(np.abs(pops - expected)) < 1e-6


def test_thermal_env_truncation_guard():
    with pytest.raises(TruncationError):
        channels.thermal_populations(5.0, 20)


def test_mean_photon_rescaling_law_all_families():
    # N_av[eta] = eta N_av + (1 - eta) N_th for every probe family
    d = 50
    states = [
        fock.coherent_state(1.5, d).projector(),
        probes.scs(3.0, 0.4, d).projector(),
        probes.on_state(8, 0.6, d).projector(),
        probes.displaced_fock(1.0, 2, d).projector(),
        probes.displaced_squeezed(0.8, 0.5, d).projector(),
        probes.classical_mixture(0.3, 1.2, d),
    ]
    for rho in states:
        n0 = fock.mean_photon(rho)
        for eta, nth in [(0.9, 0.0), (0.8, 0.1), (0.95, 0.2)]:
            out = channels.thermal_loss_channel(rho, eta, nth)
            assert abs(fock.mean_photon(out) - (eta * n0 + (1 - eta) * nth)) < 1e-6


def test_phase_rotation_identities(rng):
    rho = random_density(rng, 18)
    assert np.max(np.abs(channels.phase_rotation(rho, 0.0).mat - rho.mat)) == 0.0
    diag = fock.fock_state(3, 18).projector()
    assert np.max(np.abs(channels.phase_rotation(diag, 2 * math.pi).mat - diag.mat)) < 1e-12
    spec_before = np.linalg.eigvalsh(rho.mat)
    spec_after = np.linalg.eigvalsh(channels.phase_rotation(rho, 1.1).mat)
    assert np.max(np.abs(spec_before - spec_after)) < 1e-10


def test_phase_rotation_coherent_covariance():
    d = 35
    rho = fock.coherent_state(1.0, d).projector()
    out = channels.phase_rotation(rho, 0.6)
    tgt = fock.coherent_state(np.exp(0.6j), d).projector()
    assert np.max(np.abs(out.mat - tgt.mat)) < 1e-8


def test_channel_rotation_commutation(rng):
    for _ in range(5):
        rho = random_density(rng, 20)
        a = channels.phase_rotation(channels.loss_channel(rho, 0.8), 0.4)
        b = channels.loss_channel(channels.phase_rotation(rho, 0.4), 0.8)
        assert np.max(np.abs(a.mat - b.mat)) < 1e-9
        c = channels.phase_rotation(channels.thermal_loss_channel(rho, 0.9, 0.1), 0.4)
        d_ = channels.thermal_loss_channel(channels.phase_rotation(rho, 0.4), 0.9, 0.1)
        assert np.max(np.abs(c.mat - d_.mat)) < 1e-9


def test_channels_preserve_trace_and_hermiticity(rng):
    rho = random_density(rng, 24)
    for out in (channels.loss_channel(rho, 0.7),
                channels.thermal_loss_channel(rho, 0.7, 0.15),
                channels.phase_rotation(rho, 0.3)):
        assert abs(np.trace(out.mat).real - 1.0) < 1e-9
        assert np.max(np.abs(out.mat - out.mat.conj().T)) < 1e-9


def test_qubit_dephasing():
    d = 10
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    joint = fock.tensor_qubit(np.outer(plus, plus), fock.vacuum(d).projector())
    out = channels.qubit_dephasing(joint, 0.0)
    assert np.max(np.abs(out - joint)) == 0.0
    out = channels.qubit_dephasing(joint, 0.5)
    q = fock.qubit_marginal(out)
    assert abs(q[0, 1]) < 1e-12
    out = channels.qubit_dephasing(joint, 0.1)
    q = fock.qubit_marginal(out)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert abs(np.real(np.trace(sx @ q)) - 0.8) < 1e-12
    with pytest.raises(InvalidArgumentError):
        channels.qubit_dephasing(joint, 1.2)
