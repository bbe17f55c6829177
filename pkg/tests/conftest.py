import numpy as np
import pytest

from abcyclotron.initial_state import gaussian_density
from abcyclotron.landau import radial_cutoff
from abcyclotron.params import ModelParams
from abcyclotron.quadrature import radial_rule

# criterion id -> (passed, message); filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def params():
    return ModelParams()


@pytest.fixture(scope="session")
def rho():
    return gaussian_density()


@pytest.fixture(scope="session")
def radial():
    """Radial rule good for n <= 12 and p <= 3 (eB = 1)."""
    p = ModelParams()
    return radial_rule(radial_cutoff(12, 3.0, p), n_nodes=1024, grading=20)


def radial_inner(f, g, rule):
    r, w = rule
    return float(np.sum(w * r * f * g))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {msg}")
