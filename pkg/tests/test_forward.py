import numpy as np
import pytest
from scipy import integrate

from qhtomo.errors import EtaIsOne, GridTooNarrow
from qhtomo.forward import (NoiseModel, conditional_density_grid,
                            noisy_density, noisy_density_grid,
                            quadrature_density, radon_of_wigner)
from qhtomo.grids import Grid2D
from qhtomo.simulate import cat_conditional_unnormalized
from qhtomo.states import Cat, Coherent, Fock2, Vacuum, wigner


def test_noise_model_constants():
    nm = NoiseModel(0.95)
    assert nm.gamma == pytest.approx(np.pi / 38.0, rel=1e-12)
    assert nm.kernel(0.0) == pytest.approx(np.sqrt(38.0), rel=1e-12)


def test_noise_kernel_mass_and_variance():
    xs = np.linspace(-5, 5, 200001)
    for eta in (0.5, 0.9, 0.95):
        nm = NoiseModel(eta)
        kern = nm.kernel(xs)
        assert np.trapezoid(kern, xs) == pytest.approx(1.0, abs=1e-8)
        var = np.trapezoid(kern * xs ** 2, xs)
        assert var == pytest.approx((1 - eta) / (4 * np.pi * eta), abs=1e-10)


def test_noise_kernel_eta_one_raises():
    with pytest.raises(EtaIsOne):
        NoiseModel(1.0).kernel(0.0)


def test_fock2_conditional_closed_form():
    # conditional value at x = 0 is 2^(-1/2), independent of theta
    for theta in (0.2, 1.0, 2.7):
        joint = quadrature_density(Fock2(), 0.0, theta)
        assert np.pi * joint == pytest.approx(2.0 ** -0.5, abs=1e-9)


def test_vacuum_theta_zero():
    got = quadrature_density(Vacuum(), 0.0, 0.0)
    assert got == pytest.approx(np.sqrt(2.0) / np.pi, abs=1e-12)


def test_cat_conditional_matches_quadrature_normalized_form():
    x0 = 2.0
    for theta in (np.pi / 3, 0.15, 1.2, 2.9):
        norm = integrate.quad(
            lambda t: cat_conditional_unnormalized(t, theta, x0), -9, 9,
            limit=200)[0]
        for x in (0.7, -0.3, 1.8):
            ref = cat_conditional_unnormalized(x, theta, x0) / norm
            got = np.pi * quadrature_density(Cat(x0), x, theta)
            assert got == pytest.approx(ref, abs=1e-6)


def test_quadrature_density_nonnegative():
    xs = np.linspace(-5, 5, 301)
    for theta in (0.1, 1.0, 2.0, 3.0):
        assert np.all(quadrature_density(Cat(2.0), xs, theta) >= -1e-12)


def test_radon_vacuum_value_and_rotation_invariance():
    w = wigner(Vacuum(), Grid2D.square(-6.0, 6.0, 512))
    for theta in (0.3, 1.2, 2.5):
        assert radon_of_wigner(w, 0.0, theta) == pytest.approx(
            np.sqrt(2.0) / np.pi, abs=1e-4)
    assert radon_of_wigner(w, 0.8, 0.3) == pytest.approx(
        radon_of_wigner(w, 0.8, 1.2), abs=1e-6)


def test_radon_grid_too_narrow():
    # a coherent state centered near the edge leaves visible mass where the
    # integration line exits the grid
    w = wigner(Coherent(5.8, 0.0), Grid2D.square(-6.0, 6.0, 128), check=False)
    with pytest.raises(GridTooNarrow):
        radon_of_wigner(w, 0.0, np.pi / 2)


def test_oracle_equivalence_fock2():
    state = Fock2()
    w = wigner(state, Grid2D.square(-8.0, 8.0, 2048))
    worst = 0.0
    for x in np.linspace(-3, 3, 8):
        for theta in np.linspace(0.05, np.pi - 0.05, 5):
            worst = max(worst, abs(radon_of_wigner(w, x, theta)
                                   - quadrature_density(state, x, theta)))
    assert worst < 1e-3


def test_noisy_vacuum_closed_form():
    for eta in (0.9, 0.95):
        nm = NoiseModel(eta)
        for y in (0.0, 0.45, -1.2):
            got = np.pi * noisy_density(Vacuum(), y, 0.3, nm)
            ref = np.sqrt(2 * eta) * np.exp(-2 * np.pi * eta * y * y)
            assert got == pytest.approx(ref, abs=1e-6)
    got = np.pi * noisy_density(Vacuum(), 0.0, 0.3, NoiseModel(0.95))
    assert got == pytest.approx(np.sqrt(1.9), abs=1e-6)


def test_noisy_density_eta_one_identity():
    nm = NoiseModel(1.0)
    for state in (Cat(2.0), Fock2()):
        for x, theta in ((0.3, 0.9), (-1.0, 2.2)):
            assert noisy_density(state, x, theta, nm) == \
                quadrature_density(state, x, theta)


def test_noisy_density_mass():
    nm = NoiseModel(0.95)
    dens = noisy_density_grid(Cat(2.0), 0.4, nm, -12.0, 0.01, 2401)
    mass = np.trapezoid(dens, dx=0.01)
    assert mass == pytest.approx(1.0 / np.pi, abs=1e-4)


def test_noise_never_raises_the_peak():
    nm = NoiseModel(0.9)
    for state in (Cat(2.0), Fock2()):
        for theta in (0.3, 1.3):
            clean = conditional_density_grid(state, theta, -6, 0.005, 2401)
            noisy = noisy_density_grid(state, theta, nm, -6, 0.005, 2401) * np.pi
            assert noisy.max() <= clean.max() + 1e-9


def test_coherent_quadrature_geometry():
    # mean of the conditional law rotates with the atom's phase-space center
    a, b = 1.2, -0.8
    coh = Coherent(a, b, 0.4)
    for theta in (0.15, 0.8, 2.0, 2.9):
        mu = a * np.cos(theta) + b * np.sin(theta)
        xs = np.linspace(mu - 1, mu + 1, 41)
        dens = quadrature_density(coh, xs, theta)
        ref = np.sqrt(2) * np.exp(-2 * np.pi * (xs - mu) ** 2) / np.pi
        assert np.max(np.abs(dens - ref)) < 1e-9
