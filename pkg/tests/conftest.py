import pytest

from qhtomo import wilson


@pytest.fixture(scope="session")
def basis():
    return wilson.build_window()


@pytest.fixture(scope="session")
def smoke_runs(tmp_path_factory):
    """Two identical seeded smoke-profile pipeline invocations (fock2,
    Wilson prior), used by the end-to-end and determinism criteria."""
    from qhtomo.cli import main

    dirs = []
    for tag in ("a", "b"):
        out = tmp_path_factory.mktemp(f"smoke_{tag}")
        rc = main(["simulate", "--config", "configs/fock2.cfg",
                   "--out", str(out), "--profile", "smoke"])
        assert rc == 0
        rc = main(["fit", "--config", "configs/fock2.cfg",
                   "--out", str(out), "--profile", "smoke"])
        assert rc == 0
        dirs.append(out)
    return dirs
