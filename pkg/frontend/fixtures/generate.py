"""Regenerates the shipped example fit outputs consumed by the plots
package (seeded; runtime ~20 min).

Run from the repository root:  python frontend/fixtures/generate.py
"""

import pathlib
import sys

from qhtomo.cli import main

HERE = pathlib.Path(__file__).parent

RUNS = {
    "cat": "configs/cat.cfg",
    "fock2": None,  # cat.cfg with the state switched to fock2
}

OVERRIDES = """
[mcmc]
n_iter = 3000
burn_in = 1000
seed = 11

[grid]
lo = -8.0
hi = 8.0
n = 161

[data]
n = 2000
eta = 0.95
seed = 7
"""


def build(name, base_cfg):
    import configparser

    parser = configparser.ConfigParser()
    parser.read(base_cfg)
    over = configparser.ConfigParser()
    over.read_string(OVERRIDES)
    for section in over.sections():
        if not parser.has_section(section):
            parser.add_section(section)
        for key, val in over.items(section):
            parser.set(section, key, val)
    if name == "fock2":
        parser.set("state", "kind", "fock2")
    out_dir = HERE / name
    cfg_path = HERE / f"_{name}.cfg"
    with open(cfg_path, "w") as fh:
        parser.write(fh)
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out_dir)]) == 0
    assert main(["fit", "--config", str(cfg_path), "--out", str(out_dir)]) == 0
    cfg_path.unlink()


if __name__ == "__main__":
    for name in RUNS:
        build(name, "configs/cat.cfg")
    print("fixtures regenerated")
    sys.exit(0)
# note: the chain checkpoints (~3 MB each) are deleted before committing;
# the plots package consumes only the CSV outputs
