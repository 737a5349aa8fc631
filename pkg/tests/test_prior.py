import warnings

import numpy as np
import pytest
from scipy import stats
from scipy.special import exp1

from qhtomo import prior, wilson
from qhtomo.simulate import make_rng
from qhtomo.states import Coherent, inner_product, l2_norm


def test_config_validation():
    with pytest.raises(ValueError):
        prior.WilsonPriorConfig(b1=2.2, r=0.5)  # violates b1 > 2 + r
    with pytest.raises(ValueError):
        prior.WilsonPriorConfig(r=1.2)
    with pytest.raises(ValueError):
        prior.GammaMixtureConfig(alpha0=-1.0)


def test_sample_z_mode_and_support():
    cfg = prior.WilsonPriorConfig(a1=1.0, b1=3.0)
    # P(Z=1)/P(Z=2) = e^7: the mode is 1 by a wide margin
    lw = cfg.z_log_weights(2)
    assert lw[0] - lw[1] == pytest.approx(7.0)
    rng = make_rng(2)
    draws = np.array([prior.sample_Z(cfg, rng) for _ in range(3000)])
    assert draws.min() >= 1
    assert (draws == 1).mean() > 0.99


def test_sample_z_tail_bound():
    cfg = prior.WilsonPriorConfig(a1=0.05, b1=3.0)
    rng = make_rng(4)
    draws = np.array([prior.sample_Z(cfg, rng) for _ in range(100000)])
    for k in (1, 2, 3):
        emp = (draws > k).mean()
        assert emp <= 3.0 * np.exp(-cfg.a1 * k ** cfg.b1 / 2.0)


def test_block_simplex_unit_norm_and_weighted_bound():
    cfg = prior.WilsonPriorConfig()
    rng = make_rng(11)
    c0 = prior.c0_constant(cfg)
    for _ in range(300):
        zeff, p = prior.sample_block_simplex(cfg, prior.sample_Z(cfg, rng), rng)
        assert abs(float(np.sum(p * p)) - 1.0) < 1e-12
        s = prior.weighted_simplex_sum(p, wilson.lambda_indices(zeff),
                                       cfg.beta, cfg.r)
        assert s <= c0 * zeff ** 2


def test_block_simplex_k1_is_sqrt_dirichlet():
    cfg = prior.WilsonPriorConfig()
    zeff, p = prior.sample_block_simplex(cfg, 1, make_rng(21))
    rng = make_rng(21)
    count = len(wilson.lambda_indices(1.0))
    ref = np.sqrt(rng.dirichlet(np.full(count, cfg.dirichlet_conc)))
    assert zeff == 1.0
    assert np.max(np.abs(p - ref / np.linalg.norm(ref))) < 1e-14


def test_wilson_prior_draw(basis):
    cfg = prior.WilsonPriorConfig()
    rng = make_rng(5)
    zetas = []
    for _ in range(120):
        params = prior.sample_wilson_prior(cfg, basis, rng)
        assert abs(np.sum(params.p ** 2) - 1.0) < 1e-12
        zetas.extend(params.zeta.tolist())
    p = stats.kstest(np.array(zetas), "uniform", args=(0, 2 * np.pi)).pvalue
    assert p > 0.01


def test_wilson_prior_z_marginal_chi2(basis):
    cfg = prior.WilsonPriorConfig(a1=0.05, b1=3.0)
    rng = make_rng(6)
    draws = np.array([prior.sample_wilson_prior(cfg, basis, rng).Z
                      for _ in range(10000)])
    kmax = int(draws.max())
    lw = cfg.z_log_weights(max(kmax, cfg.z_support_max()))
    probs = np.exp(lw - lw.max())
    probs /= probs.sum()
    observed = np.array([(draws == k).sum() for k in range(1, kmax + 1)])
    expected = probs[:kmax] * draws.size
    expected[-1] += draws.size * probs[kmax:].sum()
    keep = expected > 5
    chi2 = float(np.sum((observed[keep] - expected[keep]) ** 2 / expected[keep]))
    dof = int(keep.sum()) - 1
    assert stats.chi2.sf(chi2, dof) > 0.001


def test_small_ball_positivity_on_lambda2():
    # positive hit frequency of the 12t-ball around a fixed target, t=0.04
    cfg = prior.WilsonPriorConfig()
    rng = make_rng(8)
    indices = wilson.lambda_indices(2.0)
    q = np.zeros(len(indices))
    q[0] = 0.8
    q[1:4] = np.sqrt((1 - 0.64) / 3)
    q /= np.linalg.norm(q)
    radius_sq = 12 * 0.04
    hits = 0
    n_draws = 100000
    for _ in range(n_draws):
        _, p = prior.sample_block_simplex(cfg, 2, rng)
        if float(np.sum((p - q) ** 2)) <= radius_sq:
            hits += 1
    assert hits > 0


def test_exp1_inverse_accuracy():
    ts = np.concatenate([np.logspace(-3, 1.4, 30), [25.0, 29.0]])
    ws = prior._exp1_inverse(ts)
    assert np.max(np.abs(exp1(ws) - ts) / ts) < 1e-12


def test_gamma_process_total_mass():
    cfg = prior.GammaMixtureConfig(alpha0=1.0, truncation_J=50)
    rng = make_rng(11)
    totals = np.array([prior.gamma_process_jumps(cfg, rng).sum()
                       for _ in range(10000)])
    assert abs(totals.mean() - cfg.alpha0) <= 0.05 * cfg.alpha0
    jumps = prior.gamma_process_jumps(cfg, rng)
    assert np.all(np.diff(jumps) <= 0)  # decreasing jump sizes


def test_gamma_mixture_draw_statistics():
    cfg = prior.GammaMixtureConfig(alpha0=1.0, truncation_J=25)
    rng = make_rng(13)
    locs = []
    for _ in range(2000):
        st = prior.sample_gamma_mixture(cfg, rng)
        locs.append(st.locations)
        assert st.norm > 1e-8
    cov = np.cov(np.concatenate(locs).T)
    assert abs(cov[0, 0] - 0.5) < 0.025 and abs(cov[1, 1] - 0.5) < 0.025


def test_single_atom_mixture_is_coherent():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        st = prior.sample_gamma_mixture(
            prior.GammaMixtureConfig(1.0, truncation_J=1), make_rng(3))
    atom = Coherent(st.locations[0, 0], st.locations[0, 1])
    assert abs(inner_product(st, atom)) == pytest.approx(1.0, abs=1e-6)
    assert abs(l2_norm(st) - 1.0) < 1e-6
