"""Numeric verification of the theory-facing quantities: the short-time
Fourier transform, weighted-class norms, Hellinger/L2 inequality chains,
observation tail masses, and the Fourier-Wigner decay bound; plus the
machine-readable check suite behind the `check` CLI command.
"""

from dataclasses import dataclass, field

import numpy as np

from . import chirp, states, wilson
from .errors import Diverging
from .forward import (NoiseModel, conditional_density_grid, noisy_density,
                      noisy_density_grid, quadrature_density, radon_of_wigner)
from .grids import Grid1D, Grid2D, STD_GRID
from .states import (Cat, Fock2, Tabulated, Vacuum, WaveFunction,
                     inner_product, l2_norm, wigner)


@dataclass(frozen=True)
class SmoothnessClass:
    """Weighted time-frequency class: states whose STFT against `window`
    has exp(beta ||z||^r)-weighted L1 norm at most L."""

    beta: float
    r: float
    L: float = np.inf
    window: WaveFunction = field(default_factory=Vacuum)

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError("need r in (0, 1)")
        if self.beta <= 0:
            raise ValueError("need beta > 0")

    def weight(self, xg, wg):
        return np.exp(self.beta * np.hypot(xg, wg) ** self.r)

    def dn(self, n):
        """Tail radius (log n / beta)^(1/r) of the observation window."""
        return (np.log(n) / self.beta) ** (1.0 / self.r)


def stft(f: WaveFunction, g: WaveFunction, x, w):
    """V_g f(x, w) = <f, M_w T_x g> by trapezoid quadrature."""
    ts = STD_GRID.xs
    integrand = (f.values_on(ts) * np.conj(g.values_on(ts - x))
                 * np.exp(-2j * np.pi * w * ts))
    return complex(np.trapezoid(integrand, dx=STD_GRID.spacing))


def stft_grid(f: WaveFunction, g: WaveFunction, xs, ws):
    """V_g f on a product grid, one chirp-z transform per x row."""
    ts = STD_GRID.xs
    fv = f.values_on(ts)
    gv = np.conj(g.values_on(ts))
    out = np.empty((len(xs), len(ws)), dtype=complex)
    dw = ws[1] - ws[0] if len(ws) > 1 else 1.0
    chunk = max(1, int(4e6 / ts.size))
    for s in range(0, len(xs), chunk):
        block = xs[s:s + chunk, None]
        # conj(g(t - x)) rows; g evaluated by each state's own rule
        rows = fv[None, :] * np.conj(
            g.values_on((ts[None, :] - block).ravel())
        ).reshape(-1, ts.size)
        out[s:s + rows.shape[0]] = chirp.spectrum_on_grid(
            rows, ts[0], STD_GRID.spacing, ws[0], dw, len(ws))
    return out


def _weighted_integral(values, xs, ws, cls: SmoothnessClass):
    xg = xs[:, None]
    wg = ws[None, :]
    wx = np.full(len(xs), xs[1] - xs[0]); wx[0] *= 0.5; wx[-1] *= 0.5
    ww = np.full(len(ws), ws[1] - ws[0]); ww[0] *= 0.5; ww[-1] *= 0.5
    return float(wx @ (values * cls.weight(xg, wg)) @ ww)


def class_norm(psi: WaveFunction, cls: SmoothnessClass, half=10.0, n=512,
               tail_tol=1e-3):
    """Weighted L1 norm of the STFT, integral |V_g psi| exp(beta ||z||^r),
    by tensor trapezoid with a domain-growth convergence check."""
    xs = np.linspace(-half, half, n)
    vals = np.abs(stft_grid(psi, cls.window, xs, xs))
    full = _weighted_integral(vals, xs, xs, cls)
    inner_mask = np.abs(xs) <= half - 2.0
    inner = _weighted_integral(vals[np.ix_(inner_mask, inner_mask)],
                               xs[inner_mask], xs[inner_mask], cls)
    if abs(full - inner) > tail_tol * abs(full):
        raise Diverging(
            f"weighted STFT integral not converged: {inner:g} -> {full:g}")
    return full


def wigner_fourier_decay(psi: WaveFunction, cls: SmoothnessClass, half=10.0,
                         n=512, tail_tol=1e-3):
    """integral |What_psi(z)|^2 exp(beta ||z||^r) dz, using
    What_psi(u1, u2) = exp(-i pi u1 u2) V_psi psi(-u2, u1)."""
    xs = np.linspace(-half, half, n)
    vals = np.abs(stft_grid(psi, psi, xs, xs)) ** 2
    # |What(u1, u2)| = |V_psi psi(-u2, u1)|; the weight is radially
    # symmetric so the axis swap and sign flip do not affect the integral
    full = _weighted_integral(vals, xs, xs, cls)
    inner_mask = np.abs(xs) <= half - 2.0
    inner = _weighted_integral(vals[np.ix_(inner_mask, inner_mask)],
                               xs[inner_mask], xs[inner_mask], cls)
    if abs(full - inner) > tail_tol * abs(full):
        raise Diverging("weighted Fourier-Wigner integral not converged")
    return full


# -- Hellinger distances ------------------------------------------------------

_THETA_NODES = 48
_Y_STEP = 0.01


def _theta_quadrature(n=_THETA_NODES):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return 0.5 * np.pi * (nodes + 1.0), 0.5 * np.pi * weights


def hellinger(a: WaveFunction, b: WaveFunction, nm: NoiseModel = None,
              half=14.0):
    """Hellinger distance between the joint observation laws of two states
    on R x [0, pi] (noisy laws when a noise model is given)."""
    thetas, tweights = _theta_quadrature()
    m = int(2 * half / _Y_STEP) + 1
    bc = 0.0
    for theta, tw in zip(thetas, tweights):
        if nm is None or nm.eta == 1.0:
            pa = conditional_density_grid(a, theta, -half, _Y_STEP, m) / np.pi
            pb = conditional_density_grid(b, theta, -half, _Y_STEP, m) / np.pi
        else:
            pa = noisy_density_grid(a, theta, nm, -half, _Y_STEP, m)
            pb = noisy_density_grid(b, theta, nm, -half, _Y_STEP, m)
        bc += tw * np.trapezoid(np.sqrt(np.clip(pa, 0, None)
                                        * np.clip(pb, 0, None)), dx=_Y_STEP)
    return float(np.sqrt(max(1.0 - bc, 0.0)))


def hellinger_conditional(a: WaveFunction, b: WaveFunction, theta,
                          half=14.0):
    """Hellinger distance between the clean conditional laws at a fixed
    measurement phase."""
    m = int(2 * half / _Y_STEP) + 1
    pa = conditional_density_grid(a, theta, -half, _Y_STEP, m)
    pb = conditional_density_grid(b, theta, -half, _Y_STEP, m)
    bc = np.trapezoid(np.sqrt(np.clip(pa, 0, None) * np.clip(pb, 0, None)),
                      dx=_Y_STEP)
    return float(np.sqrt(max(1.0 - bc, 0.0)))


def l2_distance(a: WaveFunction, b: WaveFunction):
    diff = a.std_samples() - b.std_samples()
    return float(np.sqrt(np.sum(np.abs(diff) ** 2) * STD_GRID.spacing))


def tail_mass(psi: WaveFunction, nm: NoiseModel, n, cls: SmoothnessClass,
              pad=12.0):
    """Mass of the noisy observation law outside |y| <= (log n / beta)^(1/r)."""
    if n < 2:
        raise ValueError("need n >= 2")
    dn = cls.dn(n)
    thetas, tweights = _theta_quadrature(16)
    # convolve over the full line so the kernel sees the density inside the
    # cutoff; integrate the two tail segments with interpolated endpoints
    m = 2 * int((dn + pad) / _Y_STEP) + 1
    ys = -(dn + pad) + _Y_STEP * np.arange(m)

    def tail_integral(dens):
        j = int(np.searchsorted(ys, dn))
        p_cut = float(np.interp(dn, ys, dens))
        right = (np.trapezoid(dens[j:], dx=_Y_STEP)
                 + 0.5 * (ys[j] - dn) * (p_cut + dens[j]))
        k = int(np.searchsorted(ys, -dn)) - 1
        p_cut = float(np.interp(-dn, ys, dens))
        left = (np.trapezoid(dens[:k + 1], dx=_Y_STEP)
                + 0.5 * (-dn - ys[k]) * (p_cut + dens[k]))
        return right + left

    total = 0.0
    for theta, tw in zip(thetas, tweights):
        dens = noisy_density_grid(psi, theta, nm, ys[0], _Y_STEP, m)
        total += tw * tail_integral(dens)
    return float(total)


def vacuum_tail_closed_form(nm: NoiseModel, n, cls: SmoothnessClass):
    """2 Phi-bar(D_n sqrt(4 pi eta)): Gaussian tail of the noisy vacuum."""
    from scipy.stats import norm

    return float(2.0 * norm.sf(cls.dn(n) * np.sqrt(4.0 * np.pi * nm.eta)))


# -- check suite ---------------------------------------------------------------

def _check(name, measured, bound, ok, inputs=None):
    return {"check": name, "measured": float(measured), "bound": float(bound),
            "pass": bool(ok), "inputs": inputs or {}}


def _builtin_states():
    return [Vacuum(), Cat(2.0), Fock2()]


def run_all_checks(fast=False):
    """Run the full diagnostics suite; returns a list of check records.

    Every record carries {check, inputs, measured, bound, pass}.  The suite
    is the numeric audit of the closed forms, the Wilson construction, the
    prior laws, and the inequality chains the posterior theory rests on.
    """
    from . import prior as prior_mod
    from .simulate import make_rng

    checks = []
    builtins = _builtin_states()
    labels = [s.label for s in builtins]

    # normalization of every built-in state
    worst = max(abs(l2_norm(s) - 1.0) for s in builtins)
    checks.append(_check("state_normalization", worst, 1e-8, worst <= 1e-8,
                         {"states": labels}))

    # vacuum Wigner closed form on a 64^2 spot grid
    g64 = Grid2D.square(-4.0, 4.0, 64)
    wv = wigner(Vacuum(), g64)
    exact = 2.0 * np.exp(-2.0 * np.pi * (g64.x.xs[:, None] ** 2
                                         + g64.omega.xs[None, :] ** 2))
    err = float(np.max(np.abs(wv.values - exact)))
    checks.append(_check("wigner_vacuum_closed_form", err, 1e-6, err <= 1e-6))

    # cat Wigner: unit mass and negativity
    wc = wigner(Cat(2.0), Grid2D.square(-6.0, 6.0, 512))
    mass_err = abs(wc.integral() - 1.0)
    checks.append(_check("wigner_integral_cat", mass_err, 1e-3,
                         mass_err <= 1e-3))
    wmin = float(wc.values.min())
    checks.append(_check("wigner_negativity_cat", wmin, 0.0, wmin < -0.1))

    # Moyal pairing and Wigner L2 norms
    grid = Grid2D.square(-8.0, 8.0, 768)
    wgs = [wigner(s, grid) for s in builtins]
    h2 = grid.x.spacing * grid.omega.spacing
    worst = 0.0
    for i, a in enumerate(builtins):
        for j, b in enumerate(builtins):
            pair = float(np.sum(wgs[i].values * wgs[j].values) * h2)
            target = abs(inner_product(a, b)) ** 2
            worst = max(worst, abs(pair - target))
    checks.append(_check("moyal_pairing", worst, 1e-5, worst <= 1e-5,
                         {"states": labels}))
    worst = max(abs(np.sqrt(np.sum(w.values ** 2) * h2) - 1.0) for w in wgs)
    checks.append(_check("wigner_l2_norm", worst, 1e-5, worst <= 1e-5))

    # quadrature density vs the Radon-of-Wigner oracle
    lattice_n = (6, 4) if fast else (20, 10)
    worst = 0.0
    for state in (Cat(2.0), Fock2()):
        worig = wigner(state, Grid2D.square(-8.0, 8.0, 2048))
        for x in np.linspace(-3.0, 3.0, lattice_n[0]):
            for theta in np.linspace(0.05, np.pi - 0.05, lattice_n[1]):
                d = abs(radon_of_wigner(worig, x, theta)
                        - quadrature_density(state, x, theta))
                worst = max(worst, d)
    checks.append(_check("radon_oracle_equivalence", worst, 1e-3,
                         worst <= 1e-3, {"lattice": list(lattice_n)}))

    # noise kernel: normalization and variance
    worst_mass, worst_var = 0.0, 0.0
    xs = np.linspace(-6.0, 6.0, 120001)
    for eta in (0.5, 0.9, 0.95):
        nm = NoiseModel(eta)
        kern = nm.kernel(xs)
        worst_mass = max(worst_mass, abs(np.trapezoid(kern, xs) - 1.0))
        var = np.trapezoid(kern * xs ** 2, xs)
        worst_var = max(worst_var, abs(var - (1.0 - eta) / (4.0 * np.pi * eta)))
    checks.append(_check("noise_kernel_mass", worst_mass, 1e-8,
                         worst_mass <= 1e-8))
    checks.append(_check("noise_kernel_variance", worst_var, 1e-10,
                         worst_var <= 1e-10))

    # noisy vacuum closed form
    worst = 0.0
    for eta in (0.9, 0.95):
        nm = NoiseModel(eta)
        ys = np.linspace(-2.0, 2.0, 41)
        got = np.array([np.pi * noisy_density(Vacuum(), y, 0.7, nm) for y in ys])
        ref = np.sqrt(2.0 * eta) * np.exp(-2.0 * np.pi * eta * ys ** 2)
        worst = max(worst, float(np.max(np.abs(got - ref))))
    checks.append(_check("noisy_vacuum_closed_form", worst, 1e-6,
                         worst <= 1e-6, {"eta": [0.9, 0.95]}))

    # Wilson basis
    basis = wilson.build_window()
    dev = wilson.gram_deviation(basis, 4.0 if fast else wilson.MAX_Z)
    checks.append(_check("wilson_gram_identity", dev, 1e-6, dev <= 1e-6,
                         {"Z": 4.0 if fast else wilson.MAX_Z}))
    checks.append(_check("wilson_window_decay", basis.decay_rate, 0.0,
                         basis.decay_rate > 0.0))
    rng = make_rng(2024)
    pcfg = prior_mod.WilsonPriorConfig()
    zeff, p = prior_mod.sample_block_simplex(pcfg, 3, rng)
    zeta = rng.uniform(0, 2 * np.pi, p.size)
    params = wilson.WilsonSeriesParams(zeff, p, zeta)
    coeffs = wilson.analyze(basis, wilson.synthesize(basis, params), zeff)
    err = float(np.max(np.abs(coeffs - p * np.exp(1j * zeta))))
    checks.append(_check("wilson_roundtrip", err, 1e-6, err <= 1e-6))

    # truncation decay rate (log error against Z^r)
    cls = SmoothnessClass(beta=1.0, r=0.5)
    zs, errs = [], []
    f2 = Fock2()
    for z in (1.0, 1.5, 2.0, 2.5, 3.0, 4.0):
        t = wilson.truncate_normalize(basis, f2, z)
        e = l2_distance(t, f2)
        if e > 1e-8:
            zs.append(z ** cls.r)
            errs.append(np.log(e))
    slope = float(np.polyfit(zs, errs, 1)[0])
    checks.append(_check("wilson_truncation_slope", slope,
                         -0.5 * cls.beta * 0.8,
                         slope <= -0.5 * cls.beta * 0.8))

    # STFT closed form and covariance
    vac = Vacuum()
    worst = 0.0
    for x, w in [(0.0, 0.0), (1.0, 0.5), (-0.7, 1.2), (2.0, -1.0)]:
        got = abs(stft(vac, vac, x, w))
        ref = np.exp(-0.5 * np.pi * (x * x + w * w))
        worst = max(worst, abs(got - ref))
    checks.append(_check("stft_gaussian_closed_form", worst, 1e-6,
                         worst <= 1e-6))
    from .states import Coherent

    shifted = Coherent(0.8, -0.6)
    worst = 0.0
    for x, w in [(0.3, 0.4), (-1.0, 1.0)]:
        got = abs(stft(shifted, vac, x, w))
        ref = abs(stft(vac, vac, x - 0.8, w + 0.6))
        worst = max(worst, abs(got - ref))
    checks.append(_check("stft_covariance", worst, 1e-8, worst <= 1e-8))

    # class norm stability under domain growth
    cls1 = SmoothnessClass(beta=1.0, r=0.5)
    n8 = class_norm(vac, cls1, half=8.0, n=448)
    n10 = class_norm(vac, cls1, half=10.0, n=560)
    rel = abs(n10 - n8) / n10
    checks.append(_check("class_norm_stability", rel, 1e-4, rel <= 1e-4))

    # window-independence of the class (embedding constant fitted once)
    g0 = Tabulated(Grid1D(-12.0, 12.0, basis.window_fine.size),
                   basis.window_fine.astype(complex))
    ratios = [class_norm(s, SmoothnessClass(1.0, 0.5, window=g0))
              / class_norm(s, cls1) for s in builtins]
    c_embed = max(ratios) * 1.01
    worst = max(ratios)
    checks.append(_check("class_window_swap", worst, c_embed,
                         worst <= c_embed, {"fitted_constant": c_embed}))

    # Hellinger inequality chains
    worst_slack = np.inf
    pairs = [(builtins[i], builtins[j]) for i in range(len(builtins))
             for j in range(i + 1, len(builtins))]
    for eta in (0.9, 0.95):
        nm = NoiseModel(eta)
        for a, b in pairs:
            h_noisy = hellinger(a, b, nm)
            h_clean = hellinger(a, b, None)
            l2 = l2_distance(a, b)
            worst_slack = min(worst_slack,
                              np.sqrt(2.0) * h_clean - h_noisy ** 2,
                              np.sqrt(2.0) * l2 - np.sqrt(2.0) * h_clean)
    checks.append(_check("hellinger_chain_slack", worst_slack, 0.0,
                         worst_slack >= -1e-9, {"eta": [0.9, 0.95]}))
    worst_slack = np.inf
    for a, b in pairs:
        hc = hellinger_conditional(a, b, 0.7)
        worst_slack = min(worst_slack, l2_distance(a, b) - hc)
    checks.append(_check("hellinger_conditional_slack", worst_slack, 0.0,
                         worst_slack >= -1e-9, {"theta": 0.7}))

    # Fourier-Wigner decay bound and DC mass
    worst = -np.inf
    for s in (vac, Fock2()):
        val = wigner_fourier_decay(s, cls1)
        norm = class_norm(s, cls1)
        worst = max(worst, val - norm ** 2)
    checks.append(_check("wigner_fourier_bound", worst, 1e-6, worst <= 1e-6))
    dc = abs(stft(vac, vac, 0.0, 0.0))  # What(0,0) = ||psi||^2 = integral W
    checks.append(_check("wigner_fourier_dc", abs(dc - 1.0), 1e-3,
                         abs(dc - 1.0) <= 1e-3))

    # observation tail masses: monotone with steep log-log slope
    nm95 = NoiseModel(0.95)
    cls4 = SmoothnessClass(beta=4.0, r=0.5)
    ns = (100, 1000, 10000)
    masses = [tail_mass(Fock2(), nm95, n, cls4) for n in ns]
    mono = masses[0] > masses[1] > masses[2] > 0.0
    slopes = [(np.log(masses[i + 1]) - np.log(masses[i]))
              / (np.log(ns[i + 1]) - np.log(ns[i])) for i in range(2)]
    worst_slope = max(slopes)
    checks.append(_check("tail_mass_slope", worst_slope, -1.8,
                         mono and worst_slope <= -1.8,
                         {"n": list(ns), "beta": 4.0, "r": 0.5}))
    errs = [abs(tail_mass(vac, nm95, n, cls4)
                - vacuum_tail_closed_form(nm95, n, cls4)) for n in ns[:2]]
    worst = max(errs)
    checks.append(_check("tail_mass_vacuum_closed_form", worst, 1e-6,
                         worst <= 1e-6))

    # prior laws
    rng = make_rng(717)
    n_draws = 100 if fast else 1000
    c0 = prior_mod.c0_constant(pcfg)
    worst_ratio, worst_unit = 0.0, 0.0
    for _ in range(n_draws):
        zeff, p = prior_mod.sample_block_simplex(pcfg, prior_mod.sample_Z(pcfg, rng), rng)
        worst_unit = max(worst_unit, abs(float(np.sum(p * p)) - 1.0))
        s = prior_mod.weighted_simplex_sum(p, wilson.lambda_indices(zeff),
                                           pcfg.beta, pcfg.r)
        worst_ratio = max(worst_ratio, s / (c0 * zeff ** 2))
    checks.append(_check("prior_simplex_unit_norm", worst_unit, 1e-12,
                         worst_unit <= 1e-12, {"draws": n_draws}))
    checks.append(_check("prior_weighted_simplex", worst_ratio, 1.0,
                         worst_ratio <= 1.0, {"c0": c0}))
    mcfg = prior_mod.GammaMixtureConfig()
    n_mix = 500 if fast else 10000
    totals = [float(np.sum(prior_mod.gamma_process_jumps(mcfg, rng)))
              for _ in range(n_mix)]
    rel = abs(np.mean(totals) - mcfg.alpha0) / mcfg.alpha0
    checks.append(_check("gamma_mixture_total_mass", rel, 0.05, rel <= 0.05,
                         {"draws": n_mix}))

    return checks
