import numpy as np
import pytest

from busgate.coupling import CouplingSchedule

# filled by test_acceptance.py, printed once at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def constant_schedule(omegas, z_max=1.0):
    return CouplingSchedule(z_max, tuple(
        (lambda z, c=float(c): np.full_like(np.asarray(z, dtype=float), c)) for c in omegas))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
