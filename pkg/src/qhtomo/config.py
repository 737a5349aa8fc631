"""Experiment configuration: a single INI file with sections for the true
state, the dataset, the prior, the sampler, and the output grid."""

import configparser
from dataclasses import dataclass, field

from .errors import ConfigError
from .infer import McmcConfig
from .prior import GammaMixtureConfig, WilsonPriorConfig

PROFILES = {
    "smoke": {"n": 500, "n_iter": 300, "burn_in": 100, "grid_n": 129},
    "paper": {"n": 2000, "n_iter": 3000, "burn_in": 1000, "grid_n": 257},
}


@dataclass
class ExperimentConfig:
    state_kind: str = "fock2"
    x0: float = 2.0
    n: int = 2000
    eta: float = 0.95
    seed: int = 7
    prior_kind: str = "wilson"
    wilson_prior: WilsonPriorConfig = field(default_factory=WilsonPriorConfig)
    mixture_prior: GammaMixtureConfig = field(default_factory=GammaMixtureConfig)
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    grid_lo: float = -6.0
    grid_hi: float = 6.0
    grid_n: int = 129
    out_dir: str = "out"

    def validate(self):
        if self.state_kind not in ("cat", "fock2"):
            raise ConfigError(f"state.kind must be cat or fock2, got "
                              f"{self.state_kind!r}")
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError(f"data.eta must be in (0, 1], got {self.eta}")
        if self.n < 0:
            raise ConfigError(f"data.n must be nonnegative, got {self.n}")
        if self.prior_kind not in ("wilson", "mixture"):
            raise ConfigError(f"prior.kind must be wilson or mixture, got "
                              f"{self.prior_kind!r}")
        if self.grid_n < 2 or not self.grid_hi > self.grid_lo:
            raise ConfigError("grid must have n >= 2 and hi > lo")
        return self

    def true_state(self):
        from .states import Cat, Fock2

        return Cat(self.x0) if self.state_kind == "cat" else Fock2()


def _get(parser, section, option, cast, default):
    if parser.has_option(section, option):
        raw = parser.get(section, option)
        try:
            return cast(raw)
        except ValueError as exc:
            raise ConfigError(f"{section}.{option}: cannot parse {raw!r}") from exc
    return default


def load_config(path, profile=None, seed=None, out_dir=None):
    """Parse and validate an experiment INI file, optionally applying a
    runtime profile (smoke or paper) and CLI overrides."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    cfg = ExperimentConfig()
    cfg.state_kind = _get(parser, "state", "kind", str, cfg.state_kind)
    cfg.x0 = _get(parser, "state", "x0", float, cfg.x0)
    cfg.n = _get(parser, "data", "n", int, cfg.n)
    cfg.eta = _get(parser, "data", "eta", float, cfg.eta)
    cfg.seed = _get(parser, "data", "seed", int, cfg.seed)
    cfg.prior_kind = _get(parser, "prior", "kind", str, cfg.prior_kind)
    try:
        cfg.wilson_prior = WilsonPriorConfig(
            a1=_get(parser, "prior", "a1", float, 0.5),
            b1=_get(parser, "prior", "b1", float, 3.0),
            M=_get(parser, "prior", "m", float, 1.0),
            beta=_get(parser, "prior", "beta", float, 1.0),
            r=_get(parser, "prior", "r", float, 0.5),
            L=_get(parser, "prior", "l", float, 5.0),
            dirichlet_conc=_get(parser, "prior", "dirichlet_conc", float, 1.0))
        cfg.mixture_prior = GammaMixtureConfig(
            alpha0=_get(parser, "prior", "alpha0", float, 1.0),
            truncation_J=_get(parser, "prior", "truncation_j", int, 20))
        cfg.mcmc = McmcConfig(
            n_iter=_get(parser, "mcmc", "n_iter", int, 3000),
            burn_in=_get(parser, "mcmc", "burn_in", int, 1000),
            z_move_prob=_get(parser, "mcmc", "z_move_prob", float, 0.2),
            target_accept=_get(parser, "mcmc", "target_accept", float, 0.25),
            k_max=_get(parser, "mcmc", "k_max", int, 4),
            seed=_get(parser, "mcmc", "seed", int, 1))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.grid_lo = _get(parser, "grid", "lo", float, cfg.grid_lo)
    cfg.grid_hi = _get(parser, "grid", "hi", float, cfg.grid_hi)
    cfg.grid_n = _get(parser, "grid", "n", int, cfg.grid_n)
    cfg.out_dir = _get(parser, "output", "dir", str, cfg.out_dir)
    if profile is not None:
        if profile not in PROFILES:
            raise ConfigError(f"unknown profile {profile!r}")
        p = PROFILES[profile]
        cfg.n = p["n"]
        cfg.mcmc.n_iter = p["n_iter"]
        cfg.mcmc.burn_in = p["burn_in"]
        cfg.grid_n = p["grid_n"]
    if seed is not None:
        cfg.seed = seed
    if out_dir is not None:
        cfg.out_dir = out_dir
    return cfg.validate()
