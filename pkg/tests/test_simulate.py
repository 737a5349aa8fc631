import numpy as np
import pytest
from scipy import integrate, stats

from qhtomo import simulate
from qhtomo.errors import RejectionBudgetExceeded
from qhtomo.forward import NoiseModel, noisy_density_grid
from qhtomo.states import Fock2


def _cdf_from_grid(xs, pdf):
    cdf = np.concatenate([[0.0], np.cumsum((pdf[1:] + pdf[:-1]) / 2 * np.diff(xs))])
    return cdf / cdf[-1]


def test_empty_draws():
    rng = simulate.make_rng(1)
    xs, thetas = simulate.sample_cat(0, 2.0, rng)
    assert xs.size == 0 and thetas.size == 0
    xs, thetas = simulate.sample_fock2(0, rng)
    assert xs.size == 0


def test_cat_conditional_ks_at_fixed_theta():
    rng = simulate.make_rng(11)
    draws = simulate.sample_cat_conditional(20000, 2.0, np.pi / 2, rng)
    xs = np.linspace(-8, 8, 8001)
    cdf = _cdf_from_grid(xs, simulate.cat_conditional(xs, np.pi / 2, 2.0))
    ks = stats.kstest(draws, lambda v: np.interp(v, xs, cdf)).statistic
    assert ks < 0.02


def test_cat_pit_over_all_phases():
    rng = simulate.make_rng(7)
    draws, thetas = simulate.sample_cat(20000, 2.0, rng)
    grid = np.linspace(-8, 8, 1601)
    u = np.empty(draws.size)
    for s in range(0, draws.size, 2000):
        th = thetas[s:s + 2000][:, None]
        pdf = simulate.cat_conditional_unnormalized(grid[None, :], th, 2.0)
        cdf = np.cumsum((pdf[:, 1:] + pdf[:, :-1]) / 2 * np.diff(grid)[None, :],
                        axis=1)
        cdf = np.concatenate([np.zeros((pdf.shape[0], 1)), cdf], axis=1)
        cdf /= cdf[:, -1:]
        idx = np.clip(np.searchsorted(grid, draws[s:s + 2000]), 1, grid.size - 1)
        rows = np.arange(pdf.shape[0])
        x0, x1 = grid[idx - 1], grid[idx]
        c0, c1 = cdf[rows, idx - 1], cdf[rows, idx]
        u[s:s + 2000] = c0 + (draws[s:s + 2000] - x0) / (x1 - x0) * (c1 - c0)
    assert stats.kstest(u, "uniform").statistic < 0.02


def test_cat_symmetry_mean():
    rng = simulate.make_rng(7)
    xs, _ = simulate.sample_cat(20000, 2.0, rng)
    assert abs(xs.mean()) < 0.02


def test_cat_normalizer_is_theta_stable():
    vals = [simulate.cat_normalizer(2.0, t) for t in (0.1, 1.0, 2.5)]
    ref = 2.0 * (1.0 + np.exp(-8 * np.pi))
    assert np.max(np.abs(np.asarray(vals) - ref)) < 1e-8


def test_theta_uniformity():
    rng = simulate.make_rng(13)
    _, thetas = simulate.sample_cat(6000, 2.0, rng)
    p = stats.kstest(thetas, "uniform", args=(0, np.pi)).pvalue
    assert p > 0.01


def test_cat_acceptance_rate_floor():
    rng = simulate.make_rng(3)
    for x0 in (0.0, 1.0, 2.0, 3.0):
        counter = simulate.RejectionStats("cat")
        simulate.sample_cat_conditional(4000, x0, 0.7, rng, counter)
        assert counter.rate() >= 0.2


def test_broken_envelope_detected(monkeypatch):
    # an absurdly loose constant drives the acceptance rate below 1e-3
    monkeypatch.setattr(simulate, "_CAT_ENVELOPE", 1e6)
    rng = simulate.make_rng(5)
    with pytest.raises(RejectionBudgetExceeded):
        simulate.sample_cat_conditional(50, 2.0, 0.4, rng)


def test_fock2_moments():
    xs, _ = simulate.sample_fock2(20000, simulate.make_rng(3))
    assert (xs ** 2).mean() == pytest.approx(5.0 / (4.0 * np.pi), abs=0.01)
    oracle = integrate.quad(simulate.fock2_density, -0.1, 0.1)[0]
    assert (np.abs(xs) < 0.1).mean() == pytest.approx(oracle, abs=0.01)


def test_add_noise_passthrough_and_variance():
    rng = simulate.make_rng(9)
    xs = rng.normal(0, 1, 100)
    ds = simulate.add_noise(xs, np.zeros(100), NoiseModel(1.0), rng)
    assert np.array_equal(ds.ys, xs)
    xv = rng.normal(0, 1 / np.sqrt(4 * np.pi), 50000)
    dv = simulate.add_noise(xv, np.zeros(50000), NoiseModel(0.95), rng)
    target = 1.0 / (4 * np.pi * 0.95)
    assert dv.ys.var() == pytest.approx(target, rel=0.02)


def test_noisy_fock2_ks_against_forward_oracle():
    xs, thetas = simulate.sample_fock2(20000, simulate.make_rng(3))
    ds = simulate.add_noise(xs, thetas, NoiseModel(0.95), simulate.make_rng(5))
    grid0, step, m = -8.0, 0.01, 1601
    pdf = np.pi * noisy_density_grid(Fock2(), 0.7, NoiseModel(0.95),
                                     grid0, step, m)
    xs_grid = grid0 + step * np.arange(m)
    cdf = _cdf_from_grid(xs_grid, pdf)
    ks = stats.kstest(ds.ys, lambda v: np.interp(v, xs_grid, cdf)).statistic
    assert ks < 0.02


def test_dataset_determinism_and_roundtrip(tmp_path):
    d1 = simulate.simulate_dataset("cat", 300, 0.95, 42, x0=2.0)
    d2 = simulate.simulate_dataset("cat", 300, 0.95, 42, x0=2.0)
    assert np.array_equal(d1.ys, d2.ys)
    assert np.array_equal(d1.thetas, d2.thetas)
    csv = tmp_path / "data.csv"
    meta = tmp_path / "data.meta.json"
    simulate.save_dataset(d1, csv, meta)
    simulate.save_dataset(d2, tmp_path / "data2.csv", tmp_path / "m2.json")
    assert csv.read_bytes() == (tmp_path / "data2.csv").read_bytes()
    back = simulate.load_dataset(csv, meta)
    assert back.n == 300
    assert back.meta["seed"] == 42
    assert np.max(np.abs(back.ys - d1.ys)) < 1e-8  # 9 significant digits


def test_empty_dataset_roundtrip(tmp_path):
    ds = simulate.Dataset(ys=np.empty(0), thetas=np.empty(0), meta={"n": 0})
    simulate.save_dataset(ds, tmp_path / "e.csv", tmp_path / "e.json")
    assert (tmp_path / "e.csv").read_text() == "y,theta\n"
    back = simulate.load_dataset(tmp_path / "e.csv", tmp_path / "e.json")
    assert back.n == 0
