"""Synthetic QHT datasets: uniform phases, rejection sampling of clean
quadratures for the cat and two-photon states, Gaussian efficiency noise,
and CSV/JSON persistence.

Rejection sampling is vectorized in rounds but consumes a single sequential
generator stream, so a fixed seed reproduces the dataset byte for byte.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import RejectionBudgetExceeded
from .forward import NoiseModel

_MAX_ROUNDS = 200


@dataclass
class Dataset:
    ys: np.ndarray
    thetas: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.ys)

    def __post_init__(self):
        if len(self.ys) != len(self.thetas):
            raise ValueError("ys and thetas must have equal length")


def make_rng(seed):
    """Counter-based generator with an explicit 64-bit seed (stable across
    platforms)."""
    return np.random.Generator(np.random.Philox(int(seed) & (2 ** 64 - 1)))


# -- cat state ------------------------------------------------------------

def cat_conditional_unnormalized(x, theta, x0):
    """Three-term conditional density of the cat state, up to the
    theta-independent normalizer (see cat_normalizer).  Broadcasts over
    x and theta."""
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    c = x0 * np.cos(theta)
    s2 = np.sqrt(2.0)
    interference = (2.0 * s2 * np.exp(-2.0 * np.pi * c * c)
                    * np.exp(-2.0 * np.pi * x * x)
                    * np.cos(4.0 * np.pi * x * x0 * np.sin(theta)))
    return (s2 * np.exp(-2.0 * np.pi * (x - c) ** 2)
            + s2 * np.exp(-2.0 * np.pi * (x + c) ** 2)
            + interference)


def cat_normalizer(x0, theta, half_width=None, n=4001):
    """Normalizer of the unnormalized conditional, computed by quadrature
    (it works out to 2 (1 + exp(-2 pi x0^2)), independent of theta, but is
    not assumed so)."""
    if half_width is None:
        half_width = abs(x0) + 6.0
    xs = np.linspace(-half_width, half_width, n)
    return np.trapezoid(cat_conditional_unnormalized(
        xs if np.ndim(theta) == 0 else xs[None, :], theta
        if np.ndim(theta) == 0 else np.asarray(theta)[:, None], x0), xs)


def cat_conditional(x, theta, x0):
    """Normalized conditional density p_cat(x | theta)."""
    return cat_conditional_unnormalized(x, theta, x0) / cat_normalizer(x0, theta)


def _candidate_sigma():
    return 1.0 / np.sqrt(4.0 * np.pi)


def _cat_candidate_density(x, c):
    s2 = np.sqrt(2.0)
    return 0.5 * (s2 * np.exp(-2.0 * np.pi * (x - c) ** 2)
                  + s2 * np.exp(-2.0 * np.pi * (x + c) ** 2))


# Envelope over the two-Gaussian candidate: the unnormalized target equals
# 2 q (1 + cos(.)/cosh(.)) <= 4 q, with equality at x = 0, for every theta.
_CAT_ENVELOPE = 4.0 * 1.05


class RejectionStats:
    """Proposal counter; flags a broken envelope."""

    def __init__(self, label):
        self.label = label
        self.proposed = 0
        self.accepted = 0

    def rate(self):
        return self.accepted / max(1, self.proposed)

    def bump(self, proposed, accepted):
        self.proposed += proposed
        self.accepted += accepted
        if self.proposed > 10000 and self.rate() < 1e-3:
            raise RejectionBudgetExceeded(
                f"{self.label} acceptance rate {self.rate():.2e}")


def _rejection_rounds(n, propose, stats):
    """Fill n slots by vectorized proposal rounds; `propose(k)` returns
    (values, accept_mask) for k fresh proposals."""
    out = np.empty(n)
    filled = 0
    for _ in range(_MAX_ROUNDS):
        need = n - filled
        if need == 0:
            return out
        k = max(16, int(1.3 * need / max(stats.rate(), 0.25)))
        values, ok = propose(k)
        stats.bump(k, int(ok.sum()))
        take = values[ok][:need]
        out[filled:filled + take.size] = take
        filled += take.size
    raise RejectionBudgetExceeded(f"{stats.label} made no progress")


def sample_cat_conditional(n, x0, theta, rng, stats=None):
    """Clean quadratures x ~ p_cat(. | theta) by rejection sampling against
    the candidate 0.5 N(-x0 cos t, 1/(4 pi)) + 0.5 N(x0 cos t, 1/(4 pi))."""
    stats = stats if stats is not None else RejectionStats("cat")
    c = x0 * np.cos(theta)
    sig = _candidate_sigma()

    def propose(k):
        centers = np.where(rng.random(k) < 0.5, c, -c)
        xs = rng.normal(centers, sig)
        target = cat_conditional_unnormalized(xs, theta, x0)
        bound = _CAT_ENVELOPE * _cat_candidate_density(xs, c)
        return xs, rng.random(k) * bound <= target

    return _rejection_rounds(n, propose, stats)


def sample_cat(n, x0, rng):
    """n clean samples (x, theta) from the cat state; theta ~ U[0, pi].

    Proposals are drawn in vectorized rounds over the pending subset, each
    sample rejecting against its own theta."""
    thetas = rng.uniform(0.0, np.pi, size=n)
    xs = np.empty(n)
    pending = np.arange(n)
    stats = RejectionStats("cat")
    sig = _candidate_sigma()
    for _ in range(_MAX_ROUNDS):
        if pending.size == 0:
            return xs, thetas
        th = thetas[pending]
        c = x0 * np.cos(th)
        centers = np.where(rng.random(pending.size) < 0.5, c, -c)
        cand = rng.normal(centers, sig)
        target = cat_conditional_unnormalized(cand, th, x0)
        bound = _CAT_ENVELOPE * _cat_candidate_density(cand, c)
        ok = rng.random(pending.size) * bound <= target
        stats.bump(pending.size, int(ok.sum()))
        xs[pending[ok]] = cand[ok]
        pending = pending[~ok]
    raise RejectionBudgetExceeded("cat sampling made no progress")


# -- two-photon state ------------------------------------------------------

def fock2_density(x):
    """p_2(x | theta) = 2^(-1/2) (4 pi x^2 - 1)^2 exp(-2 pi x^2)."""
    x = np.asarray(x, dtype=float)
    return 2.0 ** -0.5 * (4.0 * np.pi * x * x - 1.0) ** 2 * np.exp(-2.0 * np.pi * x * x)


_FOCK2_LAPLACE_B = 1.2 / np.sqrt(4.0 * np.pi)


def _laplace_density(x, b=_FOCK2_LAPLACE_B):
    return np.exp(-np.abs(x) / b) / (2.0 * b)


def _fock2_envelope():
    xs = np.linspace(-8.0, 8.0, 20001)
    return 1.05 * float(np.max(fock2_density(xs) / _laplace_density(xs)))


_FOCK2_M = _fock2_envelope()


def sample_fock2(n, rng):
    """n clean samples from the two-photon state (x is theta-independent),
    rejection sampling with a Laplace candidate."""
    thetas = rng.uniform(0.0, np.pi, size=n)
    stats = RejectionStats("fock2")
    b = _FOCK2_LAPLACE_B

    def propose(k):
        signs = np.where(rng.random(k) < 0.5, 1.0, -1.0)
        cand = rng.exponential(b, size=k) * signs
        ok = rng.random(k) * _FOCK2_M * _laplace_density(cand) <= fock2_density(cand)
        return cand, ok

    return _rejection_rounds(n, propose, stats), thetas


# -- noise and persistence --------------------------------------------------

def add_noise(xs, thetas, nm: NoiseModel, rng, meta=None):
    """y = x + sqrt((1-eta)/eta) * xi with xi ~ N(0, 1/(4 pi))."""
    xs = np.asarray(xs, dtype=float)
    if nm.eta == 1.0:
        ys = xs.copy()
    else:
        scale = np.sqrt((1.0 - nm.eta) / nm.eta) / np.sqrt(4.0 * np.pi)
        ys = xs + scale * rng.normal(size=xs.shape)
    meta = dict(meta or {})
    meta.setdefault("eta", nm.eta)
    meta.setdefault("n", len(xs))
    return Dataset(ys=ys, thetas=np.asarray(thetas, dtype=float), meta=meta)


def simulate_dataset(state_kind, n, eta, seed, x0=None):
    """End-to-end dataset generation with reproducible seeding."""
    rng = make_rng(seed)
    if state_kind == "cat":
        if x0 is None:
            raise ValueError("cat state needs x0")
        xs, thetas = sample_cat(n, x0, rng)
    elif state_kind == "fock2":
        xs, thetas = sample_fock2(n, rng)
    else:
        raise ValueError(f"unknown state kind {state_kind!r}")
    meta = {"state": state_kind, "eta": eta, "n": n, "seed": int(seed),
            "generator": "philox"}
    if x0 is not None:
        meta["x0"] = x0
    return add_noise(xs, thetas, NoiseModel(eta), rng, meta)


def save_dataset(ds: Dataset, csv_path, meta_path=None):
    with open(csv_path, "w") as fh:
        fh.write("y,theta\n")
        for y, t in zip(ds.ys, ds.thetas):
            fh.write("%.9g,%.9g\n" % (y, t))
    if meta_path is not None:
        with open(meta_path, "w") as fh:
            json.dump(ds.meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def load_dataset(csv_path, meta_path=None):
    meta = {}
    if meta_path is not None:
        with open(meta_path) as fh:
            meta = json.load(fh)
    with open(csv_path) as fh:
        header = fh.readline()
        if not header.startswith("y,theta"):
            raise ValueError(f"{csv_path} is not a dataset CSV")
        body = fh.read()
    if not body.strip():
        return Dataset(ys=np.empty(0), thetas=np.empty(0), meta=meta)
    data = np.loadtxt(body.strip().splitlines(), delimiter=",", ndmin=2)
    return Dataset(ys=data[:, 0], thetas=data[:, 1], meta=meta)
