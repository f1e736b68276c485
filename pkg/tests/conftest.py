import random

import pytest
from hypothesis import HealthCheck, settings

from bergman.expansion import a_series
from bergman.potential import fubini_study_jet
from bergman.solver import solve_coefficients

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def cp1_series():
    """a- and c-series of the Fubini-Study jet up to order 4."""
    jet = fubini_study_jet(6)
    a = a_series(jet, 4)
    return jet, a, solve_coefficients(a, 4)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
