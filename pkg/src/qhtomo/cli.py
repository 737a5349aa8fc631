"""Command line interface: simulate datasets, fit posteriors, export
Wigner grids and credible bands, run the diagnostics suite.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 diverged
chain, 5 failed diagnostics.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import diagnostics, infer, io, simulate, wilson
from .config import load_config
from .errors import ChainDiverged, ConfigError
from .forward import NoiseModel, quadrature_density
from .grids import Grid1D, Grid2D, STD_GRID
from .states import wigner

_BAND_THETAS = (0.0, np.pi / 2.0)


def _fmt(x):
    if x is None:
        return None
    return float("%.9g" % float(x))


def cmd_simulate(cfg):
    ds = simulate.simulate_dataset(cfg.state_kind, cfg.n, cfg.eta, cfg.seed,
                                   x0=cfg.x0 if cfg.state_kind == "cat" else None)
    os.makedirs(cfg.out_dir, exist_ok=True)
    simulate.save_dataset(ds, os.path.join(cfg.out_dir, "data.csv"),
                          os.path.join(cfg.out_dir, "data.meta.json"))
    print(f"wrote {ds.n} observations to {cfg.out_dir}/data.csv")
    return 0


def _posterior_mean_samples(chain, basis):
    retained = chain.retained()
    if chain.kind == "wilson":
        dim = max(len(d.p) for d in retained)
        acc = np.zeros(dim, dtype=complex)
        for d in retained:
            acc[:len(d.p)] += d.p * np.exp(1j * d.zeta)
        acc /= len(retained)
        return acc @ basis.atom_matrix(chain.indices[:dim])
    total = np.zeros(STD_GRID.n, dtype=complex)
    for d in retained:
        total += d.std_samples()
    return total / len(retained)


def aligned_l2_error(mean_samples, truth_samples):
    """L2 distance after optimal global phase alignment of the mean."""
    ip = np.sum(mean_samples * np.conj(truth_samples)) * STD_GRID.spacing
    aligned = mean_samples * np.exp(-1j * np.angle(ip))
    diff = aligned - truth_samples
    return float(np.sqrt(np.sum(np.abs(diff) ** 2) * STD_GRID.spacing))


def run_fit(cfg, data_path=None):
    """Fit the configured prior to a dataset and write all outputs.

    Returns the report dictionary."""
    t_start = time.time()
    data_csv = data_path or os.path.join(cfg.out_dir, "data.csv")
    meta_path = os.path.splitext(data_csv)[0] + ".meta.json"
    ds = simulate.load_dataset(
        data_csv, meta_path if os.path.exists(meta_path) else None)
    nm = NoiseModel(ds.meta.get("eta", cfg.eta))
    rng = simulate.make_rng(cfg.mcmc.seed)
    basis = wilson.build_window()
    if cfg.prior_kind == "wilson":
        chain = infer.mcmc_wilson(ds, basis, cfg.wilson_prior, cfg.mcmc, rng,
                                  nm=nm)
    else:
        chain = infer.mcmc_mixture(ds, cfg.mixture_prior, cfg.mcmc, rng, nm=nm)

    grid = Grid2D.square(cfg.grid_lo, cfg.grid_hi, cfg.grid_n)
    # the mixture average is quadratic in atoms per draw; cap the Wigner
    # averaging at ~500 evenly spaced retained draws
    thin = max(1, len(chain.retained()) // 500)
    w_mean = infer.posterior_mean_wigner(chain, grid, basis, thin=thin)
    truth = cfg.true_state()
    w_true = wigner(truth, grid)
    h2 = grid.x.spacing * grid.omega.spacing
    l2_wigner = float(np.sqrt(np.sum((w_mean.values - w_true.values) ** 2) * h2))
    l2_psi = aligned_l2_error(_posterior_mean_samples(chain, basis),
                              truth.std_samples())

    grid1d = Grid1D(cfg.grid_lo, cfg.grid_hi, cfg.grid_n)
    rows = []
    marg_min = np.inf
    for theta in _BAND_THETAS:
        band = infer.credible_bands(chain, theta, grid1d, level=0.95,
                                    basis=basis)
        truth_curve = np.pi * quadrature_density(truth, grid1d.xs, theta)
        marg_min = min(marg_min, float(np.min(band["mean"])))
        for j, x in enumerate(grid1d.xs):
            rows.append({"theta": theta, "x": x, "mean": band["mean"][j],
                         "lower": band["lower"][j], "upper": band["upper"][j],
                         "truth": truth_curve[j]})

    os.makedirs(cfg.out_dir, exist_ok=True)
    io.save_chain(chain, os.path.join(cfg.out_dir, "chain.jsonl"))
    io.save_wigner_csv(w_mean, os.path.join(cfg.out_dir, "wigner_mean.csv"))
    io.save_wigner_csv(w_true, os.path.join(cfg.out_dir, "wigner_true.csv"))
    io.save_marginals_csv(rows, os.path.join(cfg.out_dir, "marginals.csv"))

    # directional marginals: the exported mean curves are averages of
    # bona-fide densities, so nonnegativity is preserved by construction;
    # the grid-trapezoid marginals of the Wigner array are informational
    grid_marg_min = min(float(np.min(w_mean.marginal_x())),
                        float(np.min(w_mean.marginal_omega())))
    report = {
        "version": 1,
        "state": cfg.state_kind,
        "x0": _fmt(cfg.x0) if cfg.state_kind == "cat" else None,
        "n": ds.n,
        "eta": _fmt(nm.eta),
        "data_seed": ds.meta.get("seed"),
        "mcmc_seed": cfg.mcmc.seed,
        "prior": cfg.prior_kind,
        "n_iter": cfg.mcmc.n_iter,
        "burn_in": cfg.mcmc.burn_in,
        "retained": len(chain.retained()),
        "acceptance": {k: _fmt(v) for k, v in
                       chain.acceptance_rates().items()},
        "l2_error_psi": _fmt(l2_psi),
        "l2_error_wigner": _fmt(l2_wigner),
        "wigner_integral": _fmt(w_mean.integral()),
        "marginal_min": _fmt(marg_min),
        "grid_marginal_min": _fmt(grid_marg_min),
    }
    with open(os.path.join(cfg.out_dir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(cfg.out_dir, "timing.json"), "w") as fh:
        json.dump({"runtime_seconds": round(time.time() - t_start, 3)}, fh)
        fh.write("\n")
    return report


def cmd_fit(cfg, data_path=None):
    report = run_fit(cfg, data_path)
    print(f"posterior mean L2 error: {report['l2_error_psi']}, "
          f"Wigner L2 error: {report['l2_error_wigner']}")
    print(f"outputs in {cfg.out_dir}/")
    return 0


def cmd_wigner(cfg):
    grid = Grid2D.square(cfg.grid_lo, cfg.grid_hi, cfg.grid_n)
    w = wigner(cfg.true_state(), grid)
    os.makedirs(cfg.out_dir, exist_ok=True)
    io.save_wigner_csv(w, os.path.join(cfg.out_dir, "wigner.csv"))
    print(f"wrote {cfg.out_dir}/wigner.csv (integral {w.integral():.6f})")
    return 0


def cmd_check(out_path=None, fast=False):
    checks = diagnostics.run_all_checks(fast=fast)
    report = {"checks": checks, "passed": all(c["pass"] for c in checks)}
    if out_path:
        os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
        with open(out_path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    for c in checks:
        status = "PASS" if c["pass"] else "FAIL"
        print(f"{status} {c['check']}: measured {c['measured']:.3e} "
              f"vs bound {c['bound']:.3e}")
    if not report["passed"]:
        failed = [c["check"] for c in checks if not c["pass"]]
        print(f"FAILED checks: {', '.join(failed)}", file=sys.stderr)
        return 5
    print(f"{len(checks)} checks passed")
    return 0


def cmd_report(path):
    report_path = os.path.join(path, "report.json") if os.path.isdir(path) \
        else path
    with open(report_path) as fh:
        report = json.load(fh)
    for key in sorted(report):
        print(f"{key}: {report[key]}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qhtomo",
        description="simulate and reconstruct noisy homodyne tomography data")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "fit", "wigner"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--profile", choices=("smoke", "paper"), default=None)
        if name == "fit":
            p.add_argument("--data", default=None,
                           help="dataset CSV (default: <out>/data.csv)")
    p = sub.add_parser("check")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--fast", action="store_true",
                   help="smaller sample sizes for quick runs")
    p = sub.add_parser("report")
    p.add_argument("--data", required=True,
                   help="fit output directory or report.json path")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return cmd_check(args.out, fast=args.fast)
        if args.command == "report":
            return cmd_report(args.data)
        cfg = load_config(args.config, profile=args.profile, seed=args.seed,
                          out_dir=args.out)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "wigner":
            return cmd_wigner(cfg)
        return cmd_fit(cfg, data_path=args.data)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except ChainDiverged as exc:
        print(f"chain diverged: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
