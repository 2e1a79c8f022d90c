import math

import pytest

from ermakov.expr import constant, parse
from ermakov.systems import (
    F_VARS, SIGMA_VARS, TIME_VARS, RayReidSpec, RhoSpec, SymmetricFrequency, TimeFunction,
    symmetric_system,
)

_ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance():
    """Record a one-line verdict for an acceptance criterion."""

    def record(number, title, ok, detail):
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


@pytest.fixture(scope="session")
def rho_sqrt():
    return RhoSpec(parse("sqrt(1 + t^2)", TIME_VARS))


@pytest.fixture(scope="session")
def master_system(rho_sqrt):
    sf = SymmetricFrequency(rho_sqrt, parse("a1^2 + b1*b2", SIGMA_VARS))
    return symmetric_system(sf, parse("r", F_VARS))


@pytest.fixture(scope="session")
def elliptic_G():
    return parse("0.1/tau^2 + 0.5 + 0.2*tau + 0.1*tau^2", ["tau"])


@pytest.fixture(scope="session")
def elliptic_spec(elliptic_G):
    rho = RhoSpec(constant(1.0, TIME_VARS))
    return RayReidSpec(TimeFunction.constant(1.0), elliptic_G, rho, window=(0.0, 50.0))


TWO_PI = 2 * math.pi
