import numpy as np
import pytest

from lgdot.cascade import DotParameters


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ideal():
    """Closed dynamics: no dissipation, no noise, perfect overlap, no gate."""
    return DotParameters(
        s_fss=3.0,
        gamma_x=0.0,
        gamma_dephase0=0.0,
        gamma_phonon=0.0,
        g_noise=0.0,
        gate_width=0.0,
        eta_override=1.0,
    )


def random_density(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


# One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
