"""File formats for chains and phase-space grids.

All floats are written at 9 significant digits, giving byte-stable outputs
for seeded runs.  Chain checkpoints are versioned JSON-lines: one header
object, then one object per draw.
"""

import json

import numpy as np

from .coherent import CoherentMixture
from .grids import Grid1D, Grid2D, WignerGrid
from .infer import Chain
from .wilson import WilsonIndex, WilsonSeriesParams

CHAIN_VERSION = 1


def _fmt(x):
    return float("%.9g" % x)


def save_chain(chain: Chain, path):
    with open(path, "w") as fh:
        header = {"version": CHAIN_VERSION, "kind": chain.kind,
                  "burn_in": chain.burn_in, "seed": chain.seed,
                  "acceptance": chain.acceptance,
                  "acceptance_post": chain.acceptance_post}
        if chain.indices is not None:
            header["indices"] = [[i.l, i.two_m] for i in chain.indices]
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for draw, lp in zip(chain.draws, chain.logposts):
            if chain.kind == "wilson":
                rec = {"z": _fmt(draw.Z),
                       "p": [_fmt(v) for v in draw.p],
                       "zeta": [_fmt(v) for v in draw.zeta]}
            else:
                rec = {"w": [_fmt(v) for v in draw.weights],
                       "locs": [[_fmt(a), _fmt(b)] for a, b in draw.locations],
                       "phases": [_fmt(v) for v in draw.phases]}
            rec["logpost"] = _fmt(lp)
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_chain(path) -> Chain:
    with open(path) as fh:
        header = json.loads(fh.readline())
        if header.get("version") != CHAIN_VERSION:
            raise ValueError(f"unsupported chain version {header.get('version')}")
        draws, logposts = [], []
        for line in fh:
            rec = json.loads(line)
            logposts.append(rec["logpost"])
            if header["kind"] == "wilson":
                p = np.array(rec["p"])
                p /= np.linalg.norm(p)  # undo the 9-digit rounding drift
                draws.append(WilsonSeriesParams(
                    Z=rec["z"], p=p, zeta=np.array(rec["zeta"])))
            else:
                draws.append(CoherentMixture(
                    np.array(rec["w"]), np.array(rec["locs"]),
                    np.array(rec["phases"])))
    indices = None
    if "indices" in header:
        indices = tuple(WilsonIndex(l, tm) for l, tm in header["indices"])
    return Chain(kind=header["kind"], draws=draws,
                 logposts=np.array(logposts),
                 acceptance=header["acceptance"], burn_in=header["burn_in"],
                 seed=header.get("seed"), indices=indices,
                 acceptance_post=header.get("acceptance_post"))


def save_wigner_csv(wg: WignerGrid, path):
    with open(path, "w") as fh:
        fh.write("x,omega,w\n")
        for i, x in enumerate(wg.grid.x.xs):
            for j, om in enumerate(wg.grid.omega.xs):
                fh.write("%.9g,%.9g,%.9g\n" % (x, om, wg.values[i, j]))


def load_wigner_csv(path) -> WignerGrid:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xs = np.unique(data[:, 0])
    ws = np.unique(data[:, 1])
    vals = data[:, 2].reshape(len(xs), len(ws))
    grid = Grid2D(Grid1D(xs[0], xs[-1], len(xs)), Grid1D(ws[0], ws[-1], len(ws)))
    return WignerGrid(grid, vals)


def save_marginals_csv(rows, path):
    """rows: iterable of dicts with keys theta, x, mean, lower, upper and
    optionally truth."""
    with open(path, "w") as fh:
        fh.write("theta,x,mean,lower,upper,truth\n")
        for r in rows:
            truth = r.get("truth")
            fh.write("%.9g,%.9g,%.9g,%.9g,%.9g,%s\n" % (
                r["theta"], r["x"], r["mean"], r["lower"], r["upper"],
                "" if truth is None else "%.9g" % truth))


def load_marginals_csv(path):
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        assert header[:5] == ["theta", "x", "mean", "lower", "upper"]
        for line in fh:
            parts = line.strip().split(",")
            row = {"theta": float(parts[0]), "x": float(parts[1]),
                   "mean": float(parts[2]), "lower": float(parts[3]),
                   "upper": float(parts[4]),
                   "truth": float(parts[5]) if len(parts) > 5 and parts[5]
                   else None}
            rows.append(row)
    return rows
