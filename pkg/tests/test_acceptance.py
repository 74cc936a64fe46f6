"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report.  Tolerances are pinned here and nowhere else.
"""

import math
import time

import numpy as np
import pytest

from phasefisher import (
    analysis,
    channels,
    closedform as cf,
    fisher,
    fock,
    gaussian,
    probes,
    protocol,
)
from phasefisher.channels import NoiseSpec
from phasefisher.probes import ProbeSpec
from phasefisher.protocol import ProtocolConfig

NAV_GRID = [0.5, 1.0, 2.0, 3.0, 5.0]
ETA_GRID = [1.0, 0.99, 0.95, 0.9]
NTH_GRID = [0.0, 0.1]
DIM_CAP = 80


def _report(criterion, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def _squeezed_state(nav, dim=DIM_CAP):
    # bright squeezed vacua need fat-tail leeway below dim ~ 100
    return probes.squeezed_vacuum(probes.zeta_for_nav(nav), dim, tail_tol=1e-4)


def _apply(rho, eta, nth):
    if nth > 0.0:
        return channels.thermal_loss_channel(rho, eta, nth, trace_tol=1e-6)
    if eta < 1.0:
        return channels.loss_channel(rho, eta)
    return rho


def _numeric_qfi_both(rho):
    return fisher.qfi_fidelity(rho).value, fisher.qfi_sld(rho).value


def test_criterion_1_closed_form_vs_numeric_qfi():
    t0 = time.time()
    worst = (0.0, "")
    checks = 0

    def compare(rho, ref, tol, label):
        nonlocal worst, checks
        fid, sld = _numeric_qfi_both(rho)
        for val, tag in ((fid, "fid"), (sld, "sld")):
            rel = abs(val - ref) / ref
            if rel > worst[0]:
                worst = (rel, f"{label}/{tag}")
            assert rel <= tol, f"{label}/{tag}: rel {rel:.3%} > {tol:.0%}"
            checks += 1

    for nav in NAV_GRID:
        # coherent: exact for every (eta, n_th)
        coh = fock.coherent_state(math.sqrt(nav), 40).projector()
        for eta in ETA_GRID:
            for nth in NTH_GRID:
                compare(_apply(coh, eta, nth), cf.sql_qfi(nav, eta, nth), 0.02,
                        f"coherent N={nav} eta={eta} nth={nth}")
        # squeezed vacuum: exact for every (eta, n_th)
        sq = _squeezed_state(nav).projector()
        for eta in ETA_GRID:
            for nth in NTH_GRID:
                compare(_apply(sq, eta, nth), cf.gaussian_qfi_squeezed(nav, eta, nth),
                        0.02, f"squeezed N={nav} eta={eta} nth={nth}")
        # displaced Fock: ideal closed form only
        n_opt = cf.displaced_fock_n_opt(nav)
        alpha = math.sqrt(nav - n_opt)
        df = probes.displaced_fock(alpha, n_opt, 40).projector()
        compare(df, cf.displaced_fock_qfi(nav, n_opt), 0.02, f"displaced_fock N={nav}")
        # ON: ideal exact, lossy form flagged asymptotic (5%)
        n_on = int(math.ceil(3 * nav + 2))
        eps = probes.on_epsilon_for_nav(n_on, nav)
        on = probes.on_state(n_on, eps, n_on + 6).projector()
        for eta in ETA_GRID:
            tol = 0.02 if eta == 1.0 else 0.05
            compare(_apply(on, eta, 0.0), cf.on_qfi(nav, n_on, eta), tol,
                    f"on N={nav} eta={eta}")
        # SCS: ideal exact, lossy large-alpha form flagged asymptotic (5%)
        a2 = max(6.0, 3.0 * nav + 3.0)
        al = math.sqrt(a2)
        eps = probes.scs_epsilon_for_nav(al, nav)
        scs = probes.scs(al, eps, min(fock.default_dim(al), DIM_CAP)).projector()
        for eta in ETA_GRID:
            if eta == 1.0:
                compare(scs, cf.scs_qfi_ideal(al, eps), 0.02, f"scs N={nav} ideal")
            else:
                compare(_apply(scs, eta, 0.0), cf.scs_qfi_lossy(nav, a2, eta), 0.05,
                        f"scs N={nav} eta={eta}")

    elapsed = time.time() - t0
    _report(1, elapsed <= 300,
            f"{checks} comparisons, worst {worst[0]:.2%} at {worst[1]}, {elapsed:.0f}s")


def test_criterion_2_benchmark_values():
    ok = all(abs(cf.gaussian_bound_value(float(n)) - v) < 1e-9
             for n, v in [(1, 16.0), (2, 48.0), (3, 96.0)])
    ok &= abs(cf.sql_qfi(2.0) - 8.0) < 1e-12
    ratios = [cf.displaced_fock_qfi(float(nav)) / cf.gaussian_bound_value(float(nav))
              for nav in np.linspace(2.0, 50.0, 49)]
    ok &= all(0.2 <= r <= 0.3 for r in ratios)
    _report(2, ok, f"ideal bound {{16,48,96}}, SQL 4N, displaced-Fock ratio "
                   f"in [{min(ratios):.3f}, {max(ratios):.3f}]")


def test_criterion_3_crossing_frontiers():
    worst = 0.0
    for nav in range(1, 11):
        d_on = abs(cf.on_qfi(float(nav), 3 * nav + 2)
                   - cf.gaussian_bound_value(float(nav)))
        d_scs = abs(cf.scs_qfi_constrained(float(nav), 3.0 * nav + 1.0)
                    - cf.gaussian_bound_value(float(nav)))
        worst = max(worst, d_on, d_scs)
    _report(3, worst < 1e-9, f"ON at n=3N+2 and SCS at alpha^2=3N+1, worst |diff| {worst:.1e}")


def test_criterion_4_thresholds():
    vals = {
        "eta_min_scs": (cf.thresholds("eta_min_scs"), 0.802, 0.005),
        "eta_min_on": (cf.thresholds("eta_min_on"), 0.832, 0.005),
        "eta_min_on_vs_sql": (cf.thresholds("eta_min_on_vs_sql"), math.exp(-0.5), 1e-3),
        "nav_nge_scs(0.99)": (cf.thresholds("nav_nge_scs", 0.99), 15.7, 0.5),
        "nav_trans_gaussian(0.99)": (cf.nav_trans_gaussian(0.99), 50.5, 0.1),
    }
    ok = all(abs(v - target) <= tol for v, target, tol in vals.values())
    detail = ", ".join(f"{k}={v[0]:.4f}" for k, v in vals.items())
    _report(4, ok, detail)


def test_criterion_5_hierarchy_property_suite():
    rng = np.random.default_rng(1234)
    dim = 32
    noises = [(1.0, 0.0), (0.99, 0.0), (0.95, 0.0), (0.9, 0.0), (0.8, 0.0),
              (0.95, 0.1), (0.9, 0.1)]
    n_configs = 0
    worst_ratio = 0.0
    g_num = fock.number_op(dim)
    while n_configs < 200:
        fam = rng.choice(["coherent", "scs", "on_state", "displaced_fock",
                          "displaced_squeezed"])
        try:
            if fam == "coherent":
                psi = fock.coherent_state(rng.uniform(0.3, 2.2), dim)
            elif fam == "scs":
                psi = probes.scs(rng.uniform(1.0, 3.0), rng.uniform(0.1, 1.5), dim)
            elif fam == "on_state":
                psi = probes.on_state(int(rng.integers(2, 15)), rng.uniform(0.2, 2.0), dim)
            elif fam == "displaced_fock":
                psi = probes.displaced_fock(rng.uniform(0.0, 1.5), int(rng.integers(0, 5)), dim)
            else:
                psi = probes.displaced_squeezed(rng.uniform(0.0, 1.2), rng.uniform(0.0, 0.7), dim)
        except Exception:
            continue
        eta, nth = noises[int(rng.integers(0, len(noises)))]
        rho = _apply(psi.projector(), eta, nth)
        qfi = fisher.qfi_sld_mat(rho.mat, g_num)
        # random binary projective measurement
        m = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        m /= np.linalg.norm(m)

        def prob(th):
            p = float(np.real(m.conj() @ channels.rotate_mat(rho.mat, th) @ m))
            p = min(max(p, 0.0), 1.0)
            return np.array([p, 1.0 - p])

        theta = rng.uniform(-1.0, 1.0)
        val = fisher.cfi(prob, theta)
        if qfi > 1e-9:
            worst_ratio = max(worst_ratio, val / qfi)
        assert val <= qfi * 1.02 + 1e-9
        n_configs += 1

    # channel commutation
    from conftest import random_density
    comm = 0.0
    for _ in range(5):
        rho = random_density(rng, 24)
        a = channels.phase_rotation(channels.loss_channel(rho, 0.85), 0.3)
        b = channels.loss_channel(channels.phase_rotation(rho, 0.3), 0.85)
        comm = max(comm, float(np.max(np.abs(a.mat - b.mat))))
        c = channels.phase_rotation(channels.thermal_loss_channel(rho, 0.9, 0.1), 0.3)
        d = channels.thermal_loss_channel(channels.phase_rotation(rho, 0.3), 0.9, 0.1)
        comm = max(comm, float(np.max(np.abs(c.mat - d.mat))))
    assert comm < 1e-9

    # mean-photon rescaling law
    law_err = 0.0
    for psi in (fock.coherent_state(1.2, 40), probes.scs(2.5, 0.5, 40),
                probes.on_state(6, 0.8, 40)):
        n0 = fock.mean_photon(psi)
        for eta, nth in [(0.9, 0.1), (0.95, 0.05)]:
            out = channels.thermal_loss_channel(psi.projector(), eta, nth)
            law_err = max(law_err, abs(fock.mean_photon(out) - (eta * n0 + (1 - eta) * nth)))
    assert law_err < 1e-6

    # additivity
    ratios = [analysis.qfi_additivity_check(ProbeSpec("coherent", {"alpha": 1.0})),
              analysis.qfi_additivity_check(ProbeSpec("scs", {"alpha": 2.0, "epsilon": 0.5}),
                                            dim_small=26)]
    assert all(abs(r - 1.0) <= 0.01 for r in ratios)
    _report(5, True, f"200 configs max CFI/QFI {worst_ratio:.3f}, commutation {comm:.1e}, "
                     f"mean-photon law {law_err:.1e}, additivity {ratios}")


def test_criterion_6_gaussian_cross_engine():
    # unlike criterion 1, no dim cap applies here: the Fock side gets a basis
    # large enough that truncation sits well below the 1% gate
    dims = {0.5: 60, 1.0: 70, 2.0: 90, 3.0: 100, 5.0: 130}
    worst = 0.0
    for nav in NAV_GRID:
        g = gaussian.cm_displaced_squeezed(0.0, probes.zeta_for_nav(nav))
        rho0 = probes.squeezed_vacuum(probes.zeta_for_nav(nav), dims[nav],
                                      tail_tol=1e-6).projector()
        coh_g = gaussian.cm_displaced_squeezed(math.sqrt(nav), 0.0)
        coh_f = fock.coherent_state(math.sqrt(nav), 40).projector()
        for eta in ETA_GRID:
            for nth in NTH_GRID:
                cm = gaussian.cm_qfi(g, eta, nth)
                fk = fisher.qfi_fidelity(_apply(rho0, eta, nth)).value
                worst = max(worst, abs(cm - fk) / fk)
                cm2 = gaussian.cm_qfi(coh_g, eta, nth)
                fk2 = fisher.qfi_fidelity(_apply(coh_f, eta, nth)).value
                worst = max(worst, abs(cm2 - fk2) / fk2)
    assert worst < 0.01

    # lossy squeezed closed form to 0.5%
    worst_cf = 0.0
    for nav in NAV_GRID:
        g = gaussian.cm_displaced_squeezed(0.0, probes.zeta_for_nav(nav))
        for eta in ETA_GRID:
            ref = cf.gaussian_qfi_squeezed(nav, eta)
            worst_cf = max(worst_cf, abs(gaussian.cm_qfi(g, eta) - ref) / ref)
    _report(6, worst_cf < 0.005,
            f"cross-engine worst {worst:.3%}, closed-form worst {worst_cf:.3%}")


def test_criterion_7_protocol_studies():
    t0 = time.time()
    # ideal round trip
    p_g = protocol.run(ProtocolConfig(alpha=6.0, phi_eps=math.atan(0.3),
                                      basis="sigma_z"), 0.0)
    assert p_g >= 0.999
    # sigma_y offset
    p_y = protocol.run(ProtocolConfig(alpha=6.0, phi_eps=math.atan(0.3),
                                      basis="sigma_y"), 0.0)
    assert abs(p_y - 0.5) <= 0.01
    # basis ordering under 1% loss
    noise = NoiseSpec(eta=0.99)
    grid = np.linspace(-0.003, 0.003, 7)
    ref = dict(alpha=4.0, phi_eps=math.atan(0.3))
    cy = protocol.protocol_cfi(ProtocolConfig(**ref, basis="sigma_y", noise=noise), grid)
    cz = protocol.protocol_cfi(ProtocolConfig(**ref, basis="sigma_z", noise=noise), grid)
    i0 = int(np.argmin(np.abs(grid)))
    assert cy.values[i0] >= 10.0 * max(cz.values[i0], 1e-12)
    # bias with 1% Rabi error
    cfg = ProtocolConfig(alpha=3.0, phi_eps=math.atan(0.7), basis="sigma_y",
                         rabi_error=0.01)
    res = protocol.bias_study(cfg, np.linspace(-0.05, 0.05, 11))
    j0 = int(np.argmin(np.abs(res.thetas)))
    assert abs(res.bias[j0]) <= 1e-4
    assert 1e-4 <= abs(res.bias[-1]) <= 5e-3
    elapsed = time.time() - t0
    _report(7, elapsed <= 600,
            f"P_g(0)={p_g:.5f}, P_y(0)={p_y:.4f}, CFI_y(0)/CFI_z(0)="
            f"{cy.values[i0] / max(cz.values[i0], 1e-12):.1e}, "
            f"bias(0)={res.bias[j0]:.1e}, bias(0.05)={res.bias[-1]:.1e}, {elapsed:.0f}s")


def test_criterion_8_relative_advantage_ratios():
    tab = analysis.uncertainty_vs_loss(["gaussian", "scs"], [3.0], [0.99, 0.999],
                                       mode="cfi")
    r1 = tab.ratio(3.0, 0.99)
    r2 = tab.ratio(3.0, 0.999)
    ok = abs(r1 - 3.0) <= 0.3 * 3.0 and abs(r2 - 8.0) <= 0.4 * 8.0
    _report(8, ok, f"dtheta ratio {r1:.2f} at 1% loss (target 3 +- 30%), "
                   f"{r2:.2f} at 0.1% loss (target 8 +- 40%)")


def test_criterion_9_mixture_conjecture():
    res = analysis.mixture_study(2000, rng_seed=7)
    ok = (len(res.violations) == 0
          and 0.6 <= res.slope <= 1.1
          and -2.5 <= res.intercept <= -0.9)
    _report(9, ok, f"2000 samples, 0 violations (max ratio "
                   f"{max(s.qfi_ratio for s in res.samples):.8f}), "
                   f"slope {res.slope:.3f}, intercept {res.intercept:.3f}")


def test_criterion_10_curve_structure():
    # ON ideal CFI: exactly 2n equal peaks over [-pi, pi]
    n, nav = 10, 1.0
    th = np.linspace(-math.pi, math.pi, 80001)
    vals = np.array([cf.on_cfi(nav, n, t) for t in th])
    peaks = [i for i in range(1, th.size - 1)
             if vals[i] > vals[i - 1] and vals[i] > vals[i + 1] and vals[i] > 1.0]
    ok = len(peaks) == 2 * n
    heights = [cf.on_cfi(nav, n, (2 * k + 1) * math.pi / (2 * n)) for k in range(-n, n)]
    spread = max(heights) - min(heights)
    ok &= spread < 1e-6

    # SCS asymptotic CFI first zero within 2% of asin(pi/(2 a^2 sqrt(eta)))
    a2, eta = 9.0, 0.95
    pred = cf.scs_cfi_first_zero(a2, eta)
    grid = np.linspace(1e-4, 2.5 * pred, 30001)
    curve = np.array([cf.scs_cfi_asymptotic(0.5, a2, eta, t) for t in grid])
    k = int(np.argmin(curve[: int(0.8 * grid.size)]))
    first_zero = grid[k]
    ok &= abs(first_zero - pred) / pred < 0.02

    # symmetric probes never beat the Gaussian bound at matched (N, eta)
    ceiling = True
    for nav_s in (0.5, 1.0, 2.0, 3.0):
        for eta_s in (1.0, 0.99, 0.95, 0.9):
            n_sym = max(1, int(round(2 * nav_s)))
            if n_sym >= nav_s:
                ceiling &= (cf.on_qfi(nav_s, n_sym, eta_s)
                            <= cf.gaussian_bound_value(nav_s, eta_s) + 1e-9)
            a2_s = 2.0 * nav_s + 2.0 * math.sqrt(2.0 * nav_s)
            ceiling &= (cf.scs_qfi_symmetric_lossy(nav_s, a2_s, eta_s)
                        <= cf.gaussian_bound_value(nav_s, eta_s) + 1e-9)
    ok &= ceiling
    _report(10, ok, f"{len(peaks)} peaks (spread {spread:.1e}), first zero "
                    f"{first_zero:.5f} vs {pred:.5f}, symmetric ceiling {ceiling}")
