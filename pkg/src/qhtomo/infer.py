"""Posterior computation: likelihood kernels, Metropolis-within-Gibbs
samplers for the Wilson series prior (with trans-dimensional shell moves)
and the coherent mixture prior, posterior-mean Wigner estimates, and
sup-norm credible bands.

The Wilson likelihood is quadratic in the coefficient vector: for each
observation the noisy density is c* K_i c where K_i is a precomputed
Hermitian cross-atom kernel (Gauss-Hermite convolution of products of atom
quadrature amplitudes).  One kernel tensor serves every MCMC draw.

Amplitude blocks are sampled through an ambient lift: each shell's
amplitude direction eta lives on the positive orthant of a sphere, and a
vector v with density F(v/||v||) exp(-||v||^2/2) has exactly the marginal
eta = v/||v|| ~ F.  Random walks on v with componentwise folding are
symmetric, so the simplex law stays exact with no projection Jacobian.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import coherent
from .errors import ChainDiverged
from .forward import NoiseModel, gauss_hermite_nodes
from .grids import Grid2D, WignerGrid, STD_GRID
from .simulate import Dataset
from .states import Tabulated, WaveFunction, wigner
from .wilson import WilsonBasis, WilsonSeriesParams, lambda_indices, shell_number

_LIK_FLOOR = 1e-300
_ROTATE_BELOW = np.sqrt(0.5)


@dataclass
class McmcConfig:
    n_iter: int = 3000
    burn_in: int = 1000
    z_move_prob: float = 0.2
    target_accept: float = 0.25
    k_max: int = 4
    steps: dict = field(default_factory=lambda: {
        "amplitude": 0.20, "theta": 0.15, "phase": 0.50,
        "location": 0.30, "logweight": 0.80})
    adapt: bool = True
    seed: int | None = None

    def __post_init__(self):
        if not 0 < self.burn_in < self.n_iter:
            raise ValueError("need 0 < burn_in < n_iter")


@dataclass
class Chain:
    kind: str
    draws: list
    logposts: np.ndarray
    acceptance: dict          # move -> [accepted, proposed], whole run
    burn_in: int
    seed: int | None = None
    indices: list = None
    acceptance_post: dict = None  # counters restricted to post-burn-in

    def __post_init__(self):
        if not self.burn_in < len(self.draws):
            raise ValueError("burn-in must be smaller than the draw count")
        for move, (acc, prop) in self.acceptance.items():
            if acc > prop:
                raise ValueError(f"acceptance counter for {move} is corrupt")

    def retained(self):
        return self.draws[self.burn_in:]

    def acceptance_rates(self, post_adaptation=True):
        src_dict = self.acceptance_post if (post_adaptation and
                                            self.acceptance_post) else self.acceptance
        return {k: (a / p if p else float("nan"))
                for k, (a, p) in src_dict.items()}


# -- atom quadrature amplitudes and observation kernels ---------------------

def atom_conditional_amplitudes(basis: WilsonBasis, indices, theta, xs):
    """A_theta phi_lm at arbitrary points for every atom: (D, len(xs)).

    Up to one global (theta, x) phase, like the closed coherent forms.
    Uses the shared relative-window grid in the position domain for
    |sin theta| >= 1/sqrt(2) and the Fourier-domain tabulation otherwise.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    if abs(np.sin(theta)) >= _ROTATE_BELOW:
        u0, du, rows, centers = basis.atoms_relative(indices)
        theta_eff = theta
    else:
        u0, du, rows = basis.atom_ft_rows(indices)
        centers = np.zeros(rows.shape[0])
        theta_eff = theta - 0.5 * np.pi
    sin_t = np.sin(theta_eff)
    cot_t = np.cos(theta_eff) / sin_t
    us = u0 + du * np.arange(rows.shape[1])
    nus = xs / sin_t
    chirped = rows * np.exp(1j * np.pi * cot_t * us * us)[None, :]
    if np.any(centers):
        chirped = chirped * np.exp(2j * np.pi * np.outer(centers * cot_t, us))
    kernel = np.exp(-2j * np.pi * np.outer(us, nus))
    amp = (chirped @ kernel) * du
    const = np.exp(1j * np.pi * cot_t * centers * centers)[:, None]
    if np.any(centers):
        const = const * np.exp(-2j * np.pi * np.outer(centers, nus))
    return amp * const / np.sqrt(abs(sin_t))


def observation_kernels(basis: WilsonBasis, indices, ys, thetas,
                        nm: NoiseModel):
    """Hermitian kernel tensor (n, D, D) with noisy joint density
    p^eta(y_i, theta_i) = Re(c* K_i c) for coefficient vectors c."""
    ys = np.asarray(ys, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    d = len(indices)
    n = ys.size
    if nm.eta < 1.0:
        nodes, weights = gauss_hermite_nodes()
        offsets = np.sqrt(2.0) * nm.sigma * nodes
        weights = weights / np.sqrt(np.pi)
    else:
        offsets = np.zeros(1)
        weights = np.ones(1)
    kernels = np.empty((n, d, d), dtype=complex)
    for i in range(n):
        amp = atom_conditional_amplitudes(basis, indices, thetas[i],
                                          ys[i] + offsets)
        kernels[i] = (amp * weights[None, :]) @ amp.conj().T / np.pi
    return kernels


def kernel_density(kernels, c):
    """Noisy joint density at every observation for coefficients c:
    sum_ab c_a conj(c_b) K_ab per kernel slice."""
    flat = kernels.reshape(kernels.shape[0], -1)
    outer = np.outer(c, np.conj(c)).ravel()
    return (flat @ outer).real


def kernel_loglik(kernels, c, floor=_LIK_FLOOR):
    """Sum of log densities over observations for coefficient vector c."""
    if kernels is None or kernels.shape[0] == 0:
        return 0.0
    vals = kernel_density(kernels, c)
    return float(np.sum(np.log(np.clip(vals, floor, None))))


def log_likelihood(state: WaveFunction, data: Dataset, nm: NoiseModel):
    """Sum of log p^eta(y_i, theta_i) for a general state.

    Vectorizes over observations for coherent mixtures (closed forms) and
    for states whose quadrature law is phase-invariant; otherwise loops.
    """
    from .forward import noisy_density

    if data.n == 0:
        raise ValueError("dataset is empty")
    if nm.eta < 1.0:
        nodes, weights = gauss_hermite_nodes()
        pts = data.ys[:, None] + np.sqrt(2.0) * nm.sigma * nodes[None, :]
        weights = weights / np.sqrt(np.pi)
    else:
        pts = data.ys[:, None]
        weights = np.ones(1)
    if isinstance(state, coherent.CoherentMixture):
        amps = coherent.quadrature_amplitude_batch(
            state.locations[:, 0], state.locations[:, 1], data.thetas, pts)
        s = np.tensordot(state.raw / state.norm, amps, axes=(0, 0))
        dens = (np.abs(s) ** 2 / np.pi) @ weights
    elif getattr(state, "theta_invariant", False):
        amp = state.values_on(pts.ravel()).reshape(pts.shape)
        dens = (np.abs(amp) ** 2 / np.pi) @ weights
    else:
        dens = np.array([noisy_density(state, y, t, nm)
                         for y, t in zip(data.ys, data.thetas)])
    return float(np.sum(np.log(np.clip(dens, _LIK_FLOOR, None))))


# -- Wilson-series sampler ---------------------------------------------------

@dataclass
class ShellSpec:
    """One radial shell of the amplitude block: its atom positions within
    the full index list, the uniform scale envelope, and the Dirichlet
    concentration of the direction law."""

    sl: slice
    theta_bound: float
    conc: float

    @property
    def size(self):
        return self.sl.stop - self.sl.start


def _shell_specs(prior_cfg, k_max):
    indices = lambda_indices(k_max * prior_cfg.M)
    shells = [shell_number(i, prior_cfg.M) for i in indices]
    specs = []
    for k in range(1, k_max + 1):
        pos = [j for j, s in enumerate(shells) if s == k]
        if not pos or pos != list(range(pos[0], pos[-1] + 1)):
            raise RuntimeError("shells are not contiguous in index order")
        specs.append(ShellSpec(slice(pos[0], pos[-1] + 1),
                               prior_cfg.theta_bound(k),
                               prior_cfg.dirichlet_conc))
    return indices, specs


def _shell_count_log_prior(prior_cfg, k_max):
    """Log prior over the shell count K induced by P_Z through
    K = ceil(Z / M)."""
    z_max = max(prior_cfg.z_support_max(), int(np.ceil(k_max * prior_cfg.M)))
    logw = prior_cfg.z_log_weights(z_max)
    out = np.full(k_max, -np.inf)
    for k in range(1, k_max + 1):
        zs = [z for z in range(1, z_max + 1)
              if int(np.ceil(z / prior_cfg.M - 1e-9)) == k]
        if zs:
            out[k - 1] = logsumexp([logw[z - 1] for z in zs])
    return out


def _lift_logprior(v, conc):
    """Log density (up to constant) of the ambient lift on the positive
    orthant whose direction marginal is the sqrt-Dirichlet(conc)."""
    r = np.linalg.norm(v)
    return ((2.0 * conc - 1.0) * (np.sum(np.log(v)) - v.size * np.log(r))
            - 0.5 * r * r)


def _sample_lift(size, conc, rng):
    eta = np.sqrt(rng.dirichlet(np.full(size, conc)))
    radius = np.sqrt(rng.chisquare(size))
    return np.clip(radius * eta, 1e-12, None)


def _reflect(x, lo, hi):
    span = hi - lo
    y = (x - lo) % (2.0 * span)
    return lo + np.where(y > span, 2.0 * span - y, y)


class _WilsonState:
    def __init__(self, k, vs, thetas, zetas):
        self.k = k
        self.vs = vs          # list of ambient lift vectors per shell
        self.thetas = thetas  # list of floats, thetas[0] == 1.0
        self.zetas = zetas    # list of phase vectors per shell

    def coeffs(self, specs, dim):
        amp = np.zeros(dim)
        zeta = np.zeros(dim)
        scale = math.sqrt(sum(t * t for t in self.thetas))
        for j in range(self.k):
            v = self.vs[j]
            amp[specs[j].sl] = self.thetas[j] * (v / np.linalg.norm(v)) / scale
            zeta[specs[j].sl] = self.zetas[j]
        return amp * np.exp(1j * zeta), amp, zeta

    def logprior(self, specs, logpk):
        lp = logpk[self.k - 1]
        for j in range(self.k):
            lp += _lift_logprior(self.vs[j], specs[j].conc)
        return lp


from collections import namedtuple

WilsonDraw = namedtuple("WilsonDraw", ["Z", "p", "zeta"])


def _warm_state(init_params, specs):
    """Invert the shell map for a warm start: given amplitudes p over the
    first K shells, recover (theta_k, eta_k) with theta_1 = 1."""
    p = np.asarray(init_params.p, dtype=float)
    k = next(j + 1 for j in range(len(specs)) if specs[j].sl.stop >= p.size)
    norms = [max(np.linalg.norm(p[specs[j].sl]), 1e-9) for j in range(k)]
    thetas = [1.0] + [min(norms[j] / norms[0], 0.999 * specs[j].theta_bound)
                      for j in range(1, k)]
    vs = [np.clip(p[specs[j].sl] / norms[j], 1e-9, None)
          * np.sqrt(specs[j].size) for j in range(k)]
    zeta = np.asarray(init_params.zeta, dtype=float)
    zetas = [zeta[specs[j].sl] % (2.0 * np.pi) for j in range(k)]
    return _WilsonState(k, vs, thetas, zetas)


def _run_wilson_chain(specs, indices, logpk, kernels, mcmc_cfg, rng,
                      prior_cfg_m=1.0, draw_cls=WilsonDraw, init_params=None):
    dim = specs[-1].sl.stop
    k_max = len(specs)
    steps = dict(mcmc_cfg.steps)
    acc = {m: [0, 0] for m in ("amplitude", "theta", "phase", "z")}
    acc_post = {m: [0, 0] for m in ("amplitude", "theta", "phase", "z")}

    if init_params is not None:
        state = _warm_state(init_params, specs)
    else:
        # initial state from the prior
        k0 = 1 + int(np.searchsorted(
            np.cumsum(np.exp(logpk - logsumexp(logpk))), rng.random()))
        k0 = min(k0, k_max)
        state = _WilsonState(
            k0,
            [_sample_lift(specs[j].size, specs[j].conc, rng)
             for j in range(k0)],
            [1.0] + [rng.uniform(0.0, specs[j].theta_bound)
                     for j in range(1, k0)],
            [rng.uniform(0.0, 2.0 * np.pi, specs[j].size) for j in range(k0)])

    def loglik_of(st):
        c, _, _ = st.coeffs(specs, dim)
        return kernel_loglik(kernels, c)

    loglik = loglik_of(state)
    draws, logposts = [], []

    def adapt(move, accepted, it):
        a, p = acc[move]
        acc[move] = [a + accepted, p + 1]
        if it >= mcmc_cfg.burn_in:
            ap, pp = acc_post[move]
            acc_post[move] = [ap + accepted, pp + 1]
        elif mcmc_cfg.adapt and move in steps:
            gain = min(0.15, 2.5 / (1.0 + p) ** 0.66)
            steps[move] = float(np.clip(
                steps[move] * np.exp(gain * (accepted - mcmc_cfg.target_accept)),
                1e-4, 20.0))

    for it in range(mcmc_cfg.n_iter):
        # amplitude lifts, shell by shell
        for j in range(state.k):
            scale = steps["amplitude"] / np.sqrt(specs[j].size)
            v_new = np.abs(state.vs[j] + scale * rng.normal(size=specs[j].size))
            v_new = np.clip(v_new, 1e-12, None)
            delta = (_lift_logprior(v_new, specs[j].conc)
                     - _lift_logprior(state.vs[j], specs[j].conc))
            old_v = state.vs[j]
            state.vs[j] = v_new
            new_lik = loglik_of(state)
            if np.log(rng.random() + 1e-320) < delta + new_lik - loglik:
                loglik = new_lik
                adapt("amplitude", 1, it)
            else:
                state.vs[j] = old_v
                adapt("amplitude", 0, it)
        # shell scales (theta_1 is pinned at 1)
        for j in range(1, state.k):
            t_new = _reflect(state.thetas[j] + steps["theta"] * rng.normal(),
                             0.0, specs[j].theta_bound)
            old_t = state.thetas[j]
            state.thetas[j] = t_new
            new_lik = loglik_of(state)
            if np.log(rng.random() + 1e-320) < new_lik - loglik:
                loglik = new_lik
                adapt("theta", 1, it)
            else:
                state.thetas[j] = old_t
                adapt("theta", 0, it)
        # phases, shell by shell
        for j in range(state.k):
            z_new = (state.zetas[j]
                     + steps["phase"] * rng.normal(size=specs[j].size)) \
                % (2.0 * np.pi)
            old_z = state.zetas[j]
            state.zetas[j] = z_new
            new_lik = loglik_of(state)
            if np.log(rng.random() + 1e-320) < new_lik - loglik:
                loglik = new_lik
                adapt("phase", 1, it)
            else:
                state.zetas[j] = old_z
                adapt("phase", 0, it)
        # trans-dimensional shell birth/death
        if rng.random() < mcmc_cfg.z_move_prob and k_max > 1:
            k = state.k
            p_birth = 1.0 if k == 1 else (0.0 if k == k_max else 0.5)
            go_birth = rng.random() < p_birth
            if go_birth:
                j = k  # new shell index (0-based)
                v_new = _sample_lift(specs[j].size, specs[j].conc, rng)
                t_new = rng.uniform(0.0, specs[j].theta_bound)
                z_new = rng.uniform(0.0, 2.0 * np.pi, specs[j].size)
                state.k += 1
                state.vs.append(v_new)
                state.thetas.append(t_new)
                state.zetas.append(z_new)
                new_lik = loglik_of(state)
                p_death_back = 1.0 if k + 1 == k_max else 0.5
                ratio = (logpk[k] - logpk[k - 1] + new_lik - loglik
                         + np.log(p_death_back / p_birth))
                if np.log(rng.random() + 1e-320) < ratio:
                    loglik = new_lik
                    adapt("z", 1, it)
                else:
                    state.k -= 1
                    state.vs.pop()
                    state.thetas.pop()
                    state.zetas.pop()
                    adapt("z", 0, it)
            else:
                popped = (state.vs.pop(), state.thetas.pop(), state.zetas.pop())
                state.k -= 1
                new_lik = loglik_of(state)
                p_death = 1.0 if k == k_max else 0.5
                p_birth_back = 1.0 if k - 1 == 1 else 0.5
                ratio = (logpk[k - 2] - logpk[k - 1] + new_lik - loglik
                         + np.log(p_birth_back / p_death))
                if np.log(rng.random() + 1e-320) < ratio:
                    loglik = new_lik
                    adapt("z", 1, it)
                else:
                    state.vs.append(popped[0])
                    state.thetas.append(popped[1])
                    state.zetas.append(popped[2])
                    state.k += 1
                    adapt("z", 0, it)

        c, amp, zeta = state.coeffs(specs, dim)
        lp = state.logprior(specs, logpk) + loglik
        if np.isnan(lp):
            raise ChainDiverged(f"log posterior became NaN at iteration {it}")
        stop = specs[state.k - 1].sl.stop
        draws.append(draw_cls(
            Z=state.k * prior_cfg_m,
            p=amp[:stop] / np.linalg.norm(amp[:stop]),
            zeta=zeta[:stop]))
        logposts.append(lp)

    return draws, np.array(logposts), acc, acc_post


def mcmc_wilson(data: Dataset, basis: WilsonBasis, prior_cfg, mcmc_cfg,
                rng, nm: NoiseModel = None, init_params=None) -> Chain:
    """Metropolis-within-Gibbs over the Wilson series parameters, with
    reversible birth/death moves over the number of radial shells.

    `init_params` optionally warm-starts the chain at given series
    parameters (default: a draw from the prior)."""
    indices, specs = _shell_specs(prior_cfg, mcmc_cfg.k_max)
    logpk = _shell_count_log_prior(prior_cfg, mcmc_cfg.k_max)
    if data is not None and data.n > 0:
        if nm is None:
            nm = NoiseModel(data.meta.get("eta", 1.0))
        kernels = observation_kernels(basis, indices, data.ys, data.thetas, nm)
    else:
        kernels = None
    draws, logposts, acc, acc_post = _run_wilson_chain(
        specs, indices, logpk, kernels, mcmc_cfg, rng,
        prior_cfg_m=prior_cfg.M, draw_cls=WilsonSeriesParams,
        init_params=init_params)
    return Chain(kind="wilson", draws=draws, logposts=logposts,
                 acceptance=acc, burn_in=mcmc_cfg.burn_in,
                 seed=mcmc_cfg.seed, indices=indices, acceptance_post=acc_post)


# -- coherent-mixture sampler -------------------------------------------------

def mcmc_mixture(data: Dataset, mix_cfg, mcmc_cfg, rng,
                 nm: NoiseModel = None) -> Chain:
    """Metropolis-within-Gibbs over a fixed-size truncation of the Gamma
    process mixture: log-scale walks on weights, Gaussian walks on
    locations, wrapped walks on phases.

    The truncated weights are modelled i.i.d. Ga(alpha0/J, 1), which keeps
    the total-mass law of the Gamma process exactly and admits a product
    density (the inverse-Levy representation does not).
    """
    j_atoms = mix_cfg.truncation_J
    if data is not None and data.n > 0:
        if nm is None:
            nm = NoiseModel(data.meta.get("eta", 1.0))
        ys, thetas = data.ys, data.thetas
        if nm.eta < 1.0:
            nodes, gh_w = gauss_hermite_nodes()
            pts = ys[:, None] + np.sqrt(2.0) * nm.sigma * nodes[None, :]
            gh_w = gh_w / np.sqrt(np.pi)
        else:
            pts = ys[:, None]
            gh_w = np.ones(1)
    else:
        pts = thetas = None

    logw = np.log(np.clip(rng.gamma(mix_cfg.alpha0 / j_atoms, 1.0, j_atoms),
                          1e-12, None))
    locs = rng.normal(0.0, np.sqrt(0.5), size=(j_atoms, 2))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=j_atoms)

    def atom_amps(j):
        return coherent.quadrature_amplitude_batch(
            locs[j:j + 1, 0], locs[j:j + 1, 1], thetas, pts)[0]

    amps = None
    if pts is not None:
        amps = coherent.quadrature_amplitude_batch(
            locs[:, 0], locs[:, 1], thetas, pts)

    def norm_sq(lw, ph):
        ov = coherent.overlap(locs[:, None, 0], locs[:, None, 1],
                              locs[None, :, 0], locs[None, :, 1])
        u = np.exp(lw + 1j * ph)
        return np.real(u @ ov @ np.conj(u))

    def loglik_from(s, nsq):
        if s is None:
            return 0.0
        dens = (np.abs(s) ** 2 / np.pi) @ gh_w / nsq
        return float(np.sum(np.log(np.clip(dens, _LIK_FLOOR, None))))

    u = np.exp(logw + 1j * phases)
    s_cache = np.tensordot(u, amps, axes=(0, 0)) if amps is not None else None
    nsq = norm_sq(logw, phases)
    loglik = loglik_from(s_cache, nsq)

    def logprior_w(lw):
        return float(np.sum((mix_cfg.alpha0 / j_atoms) * lw - np.exp(lw)))

    def logprior_locs(lc):
        return float(-np.sum(lc * lc))

    steps = dict(mcmc_cfg.steps)
    acc = {m: [0, 0] for m in ("location", "logweight", "phase")}
    acc_post = {m: [0, 0] for m in ("location", "logweight", "phase")}

    def adapt(move, accepted, it):
        a, p = acc[move]
        acc[move] = [a + accepted, p + 1]
        if it >= mcmc_cfg.burn_in:
            ap, pp = acc_post[move]
            acc_post[move] = [ap + accepted, pp + 1]
        elif mcmc_cfg.adapt:
            gain = min(0.15, 2.5 / (1.0 + p) ** 0.66)
            steps[move] = float(np.clip(
                steps[move] * np.exp(gain * (accepted - mcmc_cfg.target_accept)),
                1e-4, 20.0))

    draws, logposts = [], []
    for it in range(mcmc_cfg.n_iter):
        for j in range(j_atoms):
            # location
            old_loc = locs[j].copy()
            locs[j] = old_loc + steps["location"] * rng.normal(size=2)
            old_amp = amps[j].copy() if amps is not None else None
            if amps is not None:
                amps[j] = atom_amps(j)
                s_new = s_cache + u[j] * (amps[j] - old_amp)
            else:
                s_new = None
            nsq_new = norm_sq(logw, phases)
            lik_new = loglik_from(s_new, nsq_new)
            delta = (logprior_locs(locs[j]) - logprior_locs(old_loc)
                     + lik_new - loglik)
            if np.log(rng.random() + 1e-320) < delta:
                s_cache, nsq, loglik = s_new, nsq_new, lik_new
                adapt("location", 1, it)
            else:
                locs[j] = old_loc
                if amps is not None:
                    amps[j] = old_amp
                adapt("location", 0, it)
            # log weight
            old_lw = logw[j]
            logw[j] = old_lw + steps["logweight"] * rng.normal()
            u_new = np.exp(logw[j] + 1j * phases[j])
            s_new = (s_cache + (u_new - u[j]) * amps[j]
                     if amps is not None else None)
            nsq_new = norm_sq(logw, phases)
            lik_new = loglik_from(s_new, nsq_new)
            delta = ((mix_cfg.alpha0 / j_atoms) * (logw[j] - old_lw)
                     - np.exp(logw[j]) + np.exp(old_lw) + lik_new - loglik)
            if np.log(rng.random() + 1e-320) < delta:
                s_cache, nsq, loglik = s_new, nsq_new, lik_new
                u[j] = u_new
                adapt("logweight", 1, it)
            else:
                logw[j] = old_lw
                adapt("logweight", 0, it)
            # phase
            old_ph = phases[j]
            phases[j] = (old_ph + steps["phase"] * rng.normal()) % (2 * np.pi)
            u_new = np.exp(logw[j] + 1j * phases[j])
            s_new = (s_cache + (u_new - u[j]) * amps[j]
                     if amps is not None else None)
            nsq_new = norm_sq(logw, phases)
            lik_new = loglik_from(s_new, nsq_new)
            if np.log(rng.random() + 1e-320) < lik_new - loglik:
                s_cache, nsq, loglik = s_new, nsq_new, lik_new
                u[j] = u_new
                adapt("phase", 1, it)
            else:
                phases[j] = old_ph
                adapt("phase", 0, it)

        lp = (loglik + logprior_w(logw) + logprior_locs(locs))
        if np.isnan(lp):
            raise ChainDiverged(f"log posterior became NaN at iteration {it}")
        draws.append(coherent.CoherentMixture(np.exp(logw), locs.copy(),
                                              phases.copy()))
        logposts.append(lp)
        if amps is not None and (it + 1) % 200 == 0:
            # refresh the incremental caches against drift
            u = np.exp(logw + 1j * phases)
            s_cache = np.tensordot(u, amps, axes=(0, 0))
            nsq = norm_sq(logw, phases)
            loglik = loglik_from(s_cache, nsq)

    return Chain(kind="mixture", draws=draws, logposts=np.array(logposts),
                 acceptance=acc, burn_in=mcmc_cfg.burn_in, seed=mcmc_cfg.seed,
                 acceptance_post=acc_post)


# -- posterior summaries ------------------------------------------------------

def posterior_mean_wigner(chain: Chain, grid: Grid2D,
                          basis: WilsonBasis = None, thin: int = 1) -> WignerGrid:
    """Pointwise average of the Wigner distributions of the retained draws.

    For Wilson chains this is exact via the averaged coefficient outer
    product (the Wigner transform is quadratic): eigendecompose
    mean(c c*) and sum the component Wigner grids.  Mixture chains use the
    pairwise closed-form coherent cross-Wigner kernels.  `thin` keeps every
    thin-th retained draw (the mixture path is quadratic in atoms per
    draw, so long chains are usually thinned for this average).
    """
    retained = chain.retained()[::max(1, thin)]
    if not retained:
        raise ValueError("chain has no retained draws")
    if chain.kind == "wilson":
        dim = max(len(d.p) for d in retained)
        m = np.zeros((dim, dim), dtype=complex)
        for d in retained:
            c = np.zeros(dim, dtype=complex)
            c[:len(d.p)] = d.p * np.exp(1j * d.zeta)
            m += np.outer(c, np.conj(c))
        m /= len(retained)
        evals, evecs = np.linalg.eigh(m)
        keep = evals > 1e-12 * evals.max()
        indices = chain.indices[:dim]
        atoms = basis.atom_matrix(indices)
        total = None
        for lam, vec in zip(evals[keep], evecs[:, keep].T):
            comp = Tabulated(STD_GRID, vec @ atoms)
            w = wigner(comp, grid, check=False)
            total = lam * w.values if total is None else total + lam * w.values
        return WignerGrid(grid, total)
    xg = grid.x.xs[:, None] * np.ones((1, grid.omega.n))
    wg = np.ones((grid.x.n, 1)) * grid.omega.xs[None, :]
    weight = 1.0 / len(retained)
    vals = coherent.mixture_wigner_values(
        ((d, weight) for d in retained), xg, wg)
    return WignerGrid(grid, vals)


def _draw_band_curves(chain, theta, xs, basis):
    retained = chain.retained()
    if chain.kind == "wilson":
        dim = max(len(d.p) for d in retained)
        amp = atom_conditional_amplitudes(basis, chain.indices[:dim], theta, xs)
        curves = np.empty((len(retained), xs.size))
        for t, d in enumerate(retained):
            c = np.zeros(dim, dtype=complex)
            c[:len(d.p)] = d.p * np.exp(1j * d.zeta)
            curves[t] = np.abs(c @ amp) ** 2
        return curves
    curves = np.empty((len(retained), xs.size))
    for t, d in enumerate(retained):
        curves[t] = np.abs(d.conditional_amplitude(theta, xs)) ** 2
    return curves


def credible_bands(chain: Chain, theta, grid1d, level=0.95,
                   basis: WilsonBasis = None):
    """Sup-norm credible band for the direction-theta marginal density of
    the Wigner distribution (the conditional quadrature density).

    Ranks the retained draws by sup-norm distance of their curve from the
    mean curve, keeps the ceil(level T) closest, and returns their
    pointwise envelope with the mean curve.
    """
    if not 0.0 < level <= 1.0:
        raise ValueError("level must be in (0, 1]")
    xs = grid1d.xs
    curves = _draw_band_curves(chain, theta, xs, basis)
    mean = curves.mean(axis=0)
    dist = np.max(np.abs(curves - mean[None, :]), axis=1)
    keep = int(np.ceil(level * curves.shape[0]))
    order = np.argsort(dist, kind="stable")[:keep]
    kept = curves[order]
    return {"xs": xs, "mean": mean, "lower": kept.min(axis=0),
            "upper": kept.max(axis=0), "retained": keep}
