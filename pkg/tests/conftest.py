"""Shared ensembles. Session-scoped: each is simulated once per pytest run."""

import pytest

from shelab import config as shconfig
from shelab.coefficients import CoefficientSpec
from shelab.ensemble import EnsembleConfig, run_ensemble
from shelab.lattice import make_grid
from shelab.solver import SimConfig

CONFIGS = __import__("pathlib").Path(__file__).resolve().parents[1] / "configs"

MEDIUM_TIMES = (0.1, 0.2, 0.25, 0.4, 0.5, 0.6, 0.8, 1.0)



@pytest.fixture(scope="session")
def medium_store():
    """gamma=1/2, T=1, N=2 on a length-14 ring, 10^4 paths, eight record times."""
    grid = make_grid(0.0, 14.0, 0.05, 0.05**2 / 2)
    sim = SimConfig(grid, CoefficientSpec(0.5), T=1.0, N=2.0, record_times=MEDIUM_TIMES)
    return run_ensemble(EnsembleConfig(sim, paths=10_000, seed=31337, windows=(1.0, 2.0)))


@pytest.fixture(scope="session")
def shared_cfg():
    return shconfig.load(CONFIGS / "shared.ini")


@pytest.fixture(scope="session")
def shared_store(shared_cfg):
    return run_ensemble(shared_cfg.ensemble_config())


@pytest.fixture(scope="session")
def duality_cfg():
    return shconfig.load(CONFIGS / "duality.ini")


@pytest.fixture(scope="session")
def duality_store(duality_cfg):
    return run_ensemble(duality_cfg.ensemble_config())


# ---------------------------------------------------------------- acceptance summary

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance():
    """criterion number -> (title, passed, detail); printed at the end of the run."""
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} -- {detail}")
