"""Acceptance gate: one test per primary criterion, each printing a
PASS/FAIL line (run with `pytest tests/test_acceptance.py -v -s`).

Criterion runtimes are bounded by the session budgets quoted in the
docstrings; tolerances are pinned here, not configurable.
"""

import json

import numpy as np
import pytest

from qhtomo import diagnostics, infer, io, prior, simulate, wilson
from qhtomo.diagnostics import SmoothnessClass
from qhtomo.forward import (NoiseModel, noisy_density, quadrature_density,
                            radon_of_wigner)
from qhtomo.grids import Grid2D, STD_GRID
from qhtomo.simulate import make_rng
from qhtomo.states import Fock2, Vacuum, Cat, wigner


def _report(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_closed_form_oracle_suite():
    """Vacuum Wigner and noisy vacuum density closed forms (< 10 s)."""
    grid = Grid2D.square(-4.0, 4.0, 64)
    w = wigner(Vacuum(), grid)
    exact = 2.0 * np.exp(-2.0 * np.pi * (grid.x.xs[:, None] ** 2
                                         + grid.omega.xs[None, :] ** 2))
    wigner_err = float(np.max(np.abs(w.values - exact)))
    dens_err = 0.0
    for eta in (0.9, 0.95):
        nm = NoiseModel(eta)
        for y in (-1.0, -0.3, 0.0, 0.6, 1.4):
            got = np.pi * noisy_density(Vacuum(), y, 0.8, nm)
            ref = np.sqrt(2 * eta) * np.exp(-2 * np.pi * eta * y * y)
            dens_err = max(dens_err, abs(got - ref))
    _report("closed_form_oracles",
            wigner_err < 1e-6 and dens_err < 1e-6,
            f"wigner err {wigner_err:.2e}, noisy vacuum err {dens_err:.2e} "
            "(both < 1e-6)")


def test_quadrature_vs_radon_equivalence():
    """Eq-(1)-type vs Radon-of-Wigner on a 20 x 10 lattice (< 2 min)."""
    worst = 0.0
    for state in (Cat(2.0), Fock2()):
        w = wigner(state, Grid2D.square(-8.0, 8.0, 2048))
        for x in np.linspace(-3.0, 3.0, 20):
            for theta in np.linspace(0.03, np.pi - 0.03, 10):
                worst = max(worst, abs(
                    radon_of_wigner(w, x, theta)
                    - quadrature_density(state, x, theta)))
    _report("radon_oracle_equivalence", worst < 1e-3,
            f"max |quadrature - radon| = {worst:.2e} < 1e-3")


def test_wilson_basis_criteria(basis):
    """Gram identity, round trip, truncation decay slope (< 2 min)."""
    gram_dev = wilson.gram_deviation(basis, 8.0)
    rng = make_rng(2024)
    cfg = prior.WilsonPriorConfig()
    zeff, p = prior.sample_block_simplex(cfg, 3, rng)
    zeta = rng.uniform(0, 2 * np.pi, p.size)
    params = wilson.WilsonSeriesParams(zeff, p, zeta)
    coeffs = wilson.analyze(basis, wilson.synthesize(basis, params), zeff)
    rt_err = float(np.max(np.abs(coeffs - p * np.exp(1j * zeta))))
    beta, r = 1.0, 0.5
    ref = Fock2().std_samples()
    zs, logs = [], []
    for z in (1.0, 1.5, 2.0, 2.5, 3.0, 4.0):
        t = wilson.truncate_normalize(basis, Fock2(), z)
        err = np.sqrt(np.sum(np.abs(t.values - ref) ** 2) * STD_GRID.spacing)
        if err > 1e-8:
            zs.append(z ** r)
            logs.append(np.log(err))
    slope = float(np.polyfit(zs, logs, 1)[0])
    ok = gram_dev < 1e-6 and rt_err < 1e-6 and slope <= -0.5 * beta * 0.8
    _report("wilson_basis", ok,
            f"gram {gram_dev:.2e} < 1e-6, roundtrip {rt_err:.2e} < 1e-6, "
            f"truncation slope {slope:.2f} <= {-0.5 * beta * 0.8}")


def test_prior_law_criteria():
    """Simplex laws over 1e3 draws; mixture mass over 1e4 (< 1 min)."""
    cfg = prior.WilsonPriorConfig()
    rng = make_rng(717)
    c0 = prior.c0_constant(cfg)
    worst_unit, weighted_ok = 0.0, True
    for _ in range(1000):
        zeff, p = prior.sample_block_simplex(cfg, prior.sample_Z(cfg, rng), rng)
        worst_unit = max(worst_unit, abs(float(np.sum(p * p)) - 1.0))
        s = prior.weighted_simplex_sum(p, wilson.lambda_indices(zeff),
                                       cfg.beta, cfg.r)
        weighted_ok = weighted_ok and s <= c0 * zeff ** 2
    mix = prior.GammaMixtureConfig()
    totals = [float(np.sum(prior.gamma_process_jumps(mix, rng)))
              for _ in range(10000)]
    mass_rel = abs(float(np.mean(totals)) - mix.alpha0) / mix.alpha0
    ok = worst_unit <= 1e-12 and weighted_ok and mass_rel <= 0.05
    _report("prior_laws", ok,
            f"sum p^2 dev {worst_unit:.1e} (exact), weighted simplex bound "
            f"{'held' if weighted_ok else 'violated'}, mixture mass off by "
            f"{100 * mass_rel:.1f}% (< 5%)")


def test_inequality_suite():
    """Hellinger chains, tail-mass decay, Fourier-Wigner bound (< 5 min)."""
    nm = NoiseModel(0.95)
    states = [Vacuum(), Cat(2.0), Fock2()]
    worst_slack = np.inf
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            a, b = states[i], states[j]
            h_noisy = diagnostics.hellinger(a, b, nm)
            h_clean = diagnostics.hellinger(a, b, None)
            l2 = diagnostics.l2_distance(a, b)
            worst_slack = min(worst_slack,
                              np.sqrt(2.0) * h_clean - h_noisy ** 2,
                              l2 - h_clean,
                              l2 - diagnostics.hellinger_conditional(a, b, 0.7))
    cls4 = SmoothnessClass(beta=4.0, r=0.5)
    masses = [diagnostics.tail_mass(Fock2(), nm, n, cls4)
              for n in (100, 1000, 10000)]
    slopes = [(np.log(masses[k + 1]) - np.log(masses[k])) / np.log(10.0)
              for k in range(2)]
    cls1 = SmoothnessClass(beta=1.0, r=0.5)
    fw_slack = min(diagnostics.class_norm(s, cls1) ** 2
                   - diagnostics.wigner_fourier_decay(s, cls1)
                   for s in (Vacuum(), Fock2()))
    ok = (worst_slack >= -1e-9 and masses[0] > masses[1] > masses[2]
          and max(slopes) <= -1.8 and fw_slack >= -1e-6)
    _report("inequality_suite", ok,
            f"min Hellinger slack {worst_slack:.3f} >= 0, tail slopes "
            f"{[round(s, 1) for s in slopes]} <= -1.8, Fourier-Wigner slack "
            f"{fw_slack:.2f} >= 0")


def test_sampler_correctness_toy(basis):
    """Two-atom posterior vs grid quadrature, TV 0.05, 1e5 iters (< 10 min)."""
    indices = [wilson.WilsonIndex(0, 0), wilson.WilsonIndex(1, 1)]
    ds = simulate.simulate_dataset("fock2", 40, 0.95, 17)
    kernels = infer.observation_kernels(basis, indices, ds.ys, ds.thetas,
                                        NoiseModel(0.95))
    phis = (np.arange(50) + 0.5) * (np.pi / 2) / 50
    deltas = (np.arange(50) + 0.5) * (2 * np.pi) / 50
    logpost = np.empty((50, 50))
    for a, ph in enumerate(phis):
        for b, dl in enumerate(deltas):
            c = np.array([np.cos(ph), np.sin(ph) * np.exp(1j * dl)])
            logpost[a, b] = (infer.kernel_loglik(kernels, c)
                             + np.log(np.cos(ph) * np.sin(ph)))
    post = np.exp(logpost - logpost.max())
    post /= post.sum()
    spec = infer.ShellSpec(slice(0, 2), 1.0, 1.0)
    mcfg = infer.McmcConfig(n_iter=100000, burn_in=2000, z_move_prob=0.0,
                            k_max=1)
    draws, _, _, _ = infer._run_wilson_chain(
        [spec], indices, np.array([0.0]), kernels, mcfg, make_rng(4242))
    kept = draws[2000:]
    phi_t = np.array([np.arctan2(d.p[1], d.p[0]) for d in kept])
    del_t = np.array([(d.zeta[1] - d.zeta[0]) % (2 * np.pi) for d in kept])
    h_phi = np.histogram(phi_t, bins=50, range=(0, np.pi / 2))[0] / len(kept)
    h_del = np.histogram(del_t, bins=50, range=(0, 2 * np.pi))[0] / len(kept)
    tv_phi = 0.5 * float(np.abs(h_phi - post.sum(axis=1)).sum())
    tv_del = 0.5 * float(np.abs(h_del - post.sum(axis=0)).sum())
    _report("sampler_toy_tv", tv_phi < 0.05 and tv_del < 0.05,
            f"TV(amplitude angle) {tv_phi:.3f}, TV(phase diff) {tv_del:.3f} "
            "< 0.05 vs 50x50 quadrature posterior")


def test_smoke_study(smoke_runs, basis):
    """Smoke-profile fock2 fit beats the prior baseline (< 10 min)."""
    report = json.loads((smoke_runs[0] / "report.json").read_text())
    err = report["l2_error_psi"]

    prior_chain = infer.mcmc_wilson(
        None, basis, prior.WilsonPriorConfig(),
        infer.McmcConfig(n_iter=300, burn_in=100, z_move_prob=0.25, k_max=4),
        make_rng(98))
    truth = Fock2().std_samples()
    dim = max(len(d.p) for d in prior_chain.retained())
    acc = np.zeros(dim, dtype=complex)
    for d in prior_chain.retained():
        acc[:len(d.p)] += d.p * np.exp(1j * d.zeta)
    acc /= len(prior_chain.retained())
    vals = acc @ basis.atom_matrix(prior_chain.indices[:dim])
    ip = np.sum(vals * np.conj(truth)) * STD_GRID.spacing
    baseline = float(np.sqrt(np.sum(
        np.abs(vals * np.exp(-1j * np.angle(ip)) - truth) ** 2)
        * STD_GRID.spacing))

    integral_dev = abs(report["wigner_integral"] - 1.0)
    ok = (err < baseline and err < 0.25 and integral_dev <= 2e-3
          and report["marginal_min"] >= -1e-6)
    _report("smoke_study", ok,
            f"posterior error {err:.3f} < baseline {baseline:.3f} and < 0.25 "
            f"(regression threshold); Wigner integral dev {integral_dev:.1e} "
            f"<= 2e-3; marginal min {report['marginal_min']:.1e} >= -1e-6")


def test_seeded_determinism(smoke_runs):
    """Byte-identical artifacts across identical seeded invocations."""
    a, b = smoke_runs
    files = ("data.csv", "data.meta.json", "chain.jsonl", "wigner_mean.csv",
             "wigner_true.csv", "marginals.csv", "report.json")
    diffs = [f for f in files if (a / f).read_bytes() != (b / f).read_bytes()]
    _report("determinism", not diffs,
            f"{len(files)} artifacts byte-identical across reruns"
            + (f" (diffs: {diffs})" if diffs else ""))


def test_diagnostics_suite_green():
    """The full `check` suite passes on a fresh build (ties the CLI gate
    to the acceptance run)."""
    checks = diagnostics.run_all_checks(fast=True)
    failed = [c["check"] for c in checks if not c["pass"]]
    _report("diagnostics_suite", not failed,
            f"{len(checks)} checks, failed: {failed or 'none'}")
