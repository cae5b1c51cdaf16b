import numpy as np
import pytest

from dimerbath.chain import ChainParams, SystemParams
from dimerbath.simulate import ScenarioConfig, run

REF_CHAIN = ChainParams(N=225, omega0=0.3, g=0.1, h=0.05)
KAPPA = 1e-4


def reference_config(omega_s, **kw):
    return ScenarioConfig(chain=REF_CHAIN, sys=SystemParams(omegaS=omega_s, kappa=KAPPA), **kw)


@pytest.fixture(scope="session")
def reference_runs():
    """Full t in [0, 500] trajectories at the reference parameters, computed once."""
    cache = {}

    def get(omega_s):
        if omega_s not in cache:
            cfg = reference_config(omega_s)
            cache[omega_s] = (cfg, run(cfg, threads=4))
        return cache[omega_s]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = {}


def record_criterion(number, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
