import math

import numpy as np
import pytest

from phasefisher import channels, closedform as cf, fisher, fock, probes
from phasefisher.errors import (
    InvalidArgumentError,
    InvalidDistributionError,
    NumericalInstabilityError,
    PeakUnresolvedError,
)

from conftest import random_density


def test_qfi_pure_eigenstate_and_coherent():
    d = 30
    ops = fock.oscillator_operators(d)
    assert fisher.qfi_pure(fock.fock_state(4, d), ops["n"]).value < 1e-12
    assert abs(fisher.qfi_pure(fock.coherent_state(1.0, d), ops["n"]).value - 4.0) < 1e-8


def test_qfi_pure_squeezed_hits_gaussian_bound():
    d = 60
    sq = probes.squeezed_vacuum(probes.zeta_for_nav(1.0), d)
    val = fisher.qfi_pure(sq, fock.oscillator_operators(d)["n"]).value
    assert abs(val - 16.0) < 1e-5


def test_qfi_pure_rejects_non_hermitian():
    d = 10
    bad = fock.OperatorMatrix(fock.annihilation(d), "annihilation")
    with pytest.raises(InvalidArgumentError):
        fisher.qfi_pure(fock.vacuum(d), bad)


def test_qfi_fidelity_rotation_invariant_state():
    d = 15
    diag = np.diag([0.4, 0.3, 0.2, 0.1] + [0] * (d - 4)).astype(complex)
    assert fisher.qfi_fidelity(fock.DensityMatrix(diag, d)).value < 1e-6


def test_qfi_fidelity_coherent():
    rho = fock.coherent_state(1.0, 30).projector()
    assert abs(fisher.qfi_fidelity(rho).value - 4.0) < 1e-3


def test_qfi_fidelity_lossy_on_state():
    rho = channels.loss_channel(probes.on_state(10, math.sqrt(1 / 9), 20).projector(), 0.9)
    ref = cf.on_qfi(1.0, 10, 0.9)  # qutrit-model closed form
    val = fisher.qfi_fidelity(rho).value
    assert abs(val - ref) / ref < 0.02
    assert "spread" in fisher.qfi_fidelity(rho).diagnostics


def test_qfi_fidelity_dtheta_bounds():
    rho = fock.vacuum(10).projector()
    with pytest.raises(InvalidArgumentError):
        fisher.qfi_fidelity(rho, dtheta=1.0)


def test_qfi_sld_pure_reduction(rng):
    d = 30
    ops = fock.oscillator_operators(d)
    psi = probes.scs(2.0, 0.7, d)
    a = fisher.qfi_pure(psi, ops["n"]).value
    b = fisher.qfi_sld(psi.projector()).value
    assert abs(a - b) < 1e-8


def test_qfi_sld_maximally_mixed_is_zero():
    d = 6
    rho = fock.DensityMatrix(np.eye(d, dtype=complex) / d, d)
    assert fisher.qfi_sld(rho).value < 1e-12


def test_qfi_methods_agree_lossy_scs():
    rho = channels.loss_channel(probes.scs(3.0, 0.3, 40).projector(), 0.95)
    a = fisher.qfi_fidelity(rho).value
    b = fisher.qfi_sld(rho).value
    assert abs(a - b) / b < 0.01


def test_qfi_method_agreement_random_mixed(rng):
    hits = 0
    for _ in range(50):
        rho = random_density(rng, int(rng.integers(8, 25)), rank=int(rng.integers(2, 5)))
        sld = fisher.qfi_sld(rho).value
        if sld < 0.1:
            continue
        fid = fisher.qfi_fidelity(rho.mat if False else rho).value
        assert abs(sld - fid) <= 0.01 * sld
        hits += 1
    assert hits >= 30


def test_cfi_flat_distribution():
    assert fisher.cfi(lambda th: np.array([0.3, 0.7]), 0.2) == 0.0


def test_cfi_binary_cosine_model():
    prob = lambda th: np.array([(1 + math.cos(th)) / 2, (1 - math.cos(th)) / 2])
    # analytic CFI of this model is exactly 1 at every theta
    assert abs(fisher.cfi(prob, math.pi / 2) - 1.0) < 1e-6


def test_cfi_on_model_peak_value():
    n, b = 10, 0.3
    prob = lambda th: np.array([0.5 + b * math.cos(n * th), 0.5 - b * math.cos(n * th)])
    assert abs(fisher.cfi(prob, math.pi / 20) - 36.0) < 1e-2


def test_cfi_guards():
    with pytest.raises(InvalidDistributionError):
        fisher.cfi(lambda th: np.array([0.5, 0.2]), 0.0)
    # an exactly-zero outcome with zero derivative contributes nothing
    prob = lambda th: np.array([(1 + math.cos(th)) / 2, (1 - math.cos(th)) / 2, 0.0])
    assert abs(fisher.cfi(prob, 1.0) - 1.0) < 1e-6
    # zero probability with a finite slope is inconsistent
    bad = lambda th: np.array([1.0 - max(th, 0.0), max(th, 0.0)])
    with pytest.raises(NumericalInstabilityError):
        fisher.cfi(bad, 0.0, dtheta=1e-3)


def test_mean_cfi_constant_and_triangle():
    th = np.linspace(-1, 1, 201)
    const = fisher.FisherCurve(th, np.full_like(th, 5.0))
    assert abs(fisher.mean_cfi(const, [(-0.5, 0.7)]) - 5.0) < 1e-12
    tri = fisher.FisherCurve(th, np.clip(1 - np.abs(th) / 0.5, 0, None) * 8.0)
    assert abs(fisher.mean_cfi(tri, [(-0.5, 0.5)]) - 4.0) < 1e-3
    with pytest.raises(InvalidArgumentError):
        fisher.mean_cfi(const, [])


def test_fwhm_sin_squared_peak():
    # F ~ sin^2(10 theta) around its peak at pi/20: FWHM = pi/20
    th = np.linspace(0.01, 0.30, 4001)
    curve = fisher.FisherCurve(th, np.sin(10 * th) ** 2)
    assert abs(fisher.fwhm(curve) - math.pi / 20) < 1e-4


def test_fwhm_gaussian_peak():
    sigma = 0.2
    th = np.linspace(-1.5, 1.5, 4001)
    curve = fisher.FisherCurve(th, np.exp(-th ** 2 / (2 * sigma ** 2)))
    assert abs(fisher.fwhm(curve) - 2.3548 * sigma) < 1e-3


def test_fwhm_flat_curve_unresolved():
    th = np.linspace(-1, 1, 101)
    with pytest.raises(PeakUnresolvedError):
        fisher.fwhm(fisher.FisherCurve(th, np.ones_like(th)))


def test_nge_range_cases():
    th = np.linspace(-1, 1, 2001)
    vals = np.cos(th) ** 2
    curve = fisher.FisherCurve(th, vals)
    empty, total = fisher.nge_range(curve, 2.0)
    assert empty == [] and total == 0.0
    full, total = fisher.nge_range(curve, 0.0)
    assert abs(total - 2.0) < 1e-9
    # interpolated crossing: cos^2 > 1/2 on (-pi/4, pi/4)
    ivs, total = fisher.nge_range(curve, 0.5)
    assert len(ivs) == 1
    assert abs(total - math.pi / 2) < 1e-3


def test_nge_range_ideal_scs_example():
    grid = np.linspace(-0.6, 0.6, 3001)
    vals = [cf.scs_cfi_asymptotic(1.0, 10.0, 1.0, t) for t in grid]
    curve = fisher.FisherCurve(grid, vals)
    ivs, total = fisher.nge_range(curve, 16.0)
    assert total > 0.0
    assert fisher.mean_cfi(curve, ivs) > 16.0


def test_fisher_curve_validation_and_csv():
    th = np.linspace(0, 1, 5)
    with pytest.raises(InvalidArgumentError):
        fisher.FisherCurve(th[::-1].copy(), np.ones(5))
    with pytest.raises(InvalidArgumentError):
        fisher.FisherCurve(th, np.array([1, 2, np.nan, 3, 4.0]))
    curve = fisher.FisherCurve(th, np.arange(5.0))
    text = curve.to_csv(["meta line"])
    assert text.startswith("# meta line\ntheta,value\n")
    assert "0.25,1" in text and "0.75,3" in text


def test_grids():
    g = fisher.uniform_grid()
    assert g.size == 801 and abs(g[0] + math.pi / 2) < 1e-12
    r = fisher.refined_grid(0.05)
    assert np.all(np.diff(r) > 0)
    core = r[np.abs(r) <= 0.05]
    assert core.size > 700
