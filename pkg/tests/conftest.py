"""Shared fixtures and the acceptance-summary hook.

The expensive objects (mode sets, coupling matrices, the sech-well
spectra) are session scoped; they are deterministic, so sharing them
between files costs nothing in isolation.
"""

import numpy as np
import pytest

from twistres import (CrossSectionSpec, PotentialSpec, TwistProfile,
                      coupling_matrices, poschl_teller_spectrum,
                      solve_transverse_modes)

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def rect_spec():
    return CrossSectionSpec.rectangle(np.pi, np.pi / 2)


@pytest.fixture(scope="session")
def rect_modes(rect_spec):
    return solve_transverse_modes(rect_spec, 6)


@pytest.fixture(scope="session")
def rect_coupling(rect_modes):
    return coupling_matrices(rect_modes)


@pytest.fixture(scope="session")
def disk_modes():
    return solve_transverse_modes(CrossSectionSpec.disk(1.0), 6)


@pytest.fixture(scope="session")
def disk_coupling(disk_modes):
    return coupling_matrices(disk_modes)


@pytest.fixture(scope="session")
def sech_state_nu1():
    return poschl_teller_spectrum(1.0)[0]


@pytest.fixture(scope="session")
def delta_potential():
    return PotentialSpec.delta_limit()


@pytest.fixture(scope="session")
def linear_twist():
    return TwistProfile.linear()


@pytest.fixture(scope="session")
def acceptance():
    """Record one pass/fail line per acceptance criterion and assert it.

    The lines are replayed in a terminal section at the end of the run,
    so the verdicts survive pytest's output capturing.
    """

    def record(criterion, passed, detail):
        verdict = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"{verdict}  {criterion}: {detail}")
        print(_ACCEPTANCE_LINES[-1])
        assert passed, f"{criterion}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
