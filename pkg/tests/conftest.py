import numpy as np
import pytest
from hypothesis import settings

from dirac_torus import GOLDEN, CircleLift, make_diffeo

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def rotation():
    return make_diffeo(CircleLift.identity(), GOLDEN)


@pytest.fixture(scope="session")
def sine_diffeo():
    """Conjugator theta + 0.3 sin theta, golden rotation number."""
    return make_diffeo(CircleLift.sine(0.3), GOLDEN)


@pytest.fixture(scope="session")
def two_mode_diffeo():
    return make_diffeo(CircleLift(((1, 0.2, 0.4), (2, 0.1, 1.3))), GOLDEN)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def acceptance():
    """Record one verdict line per acceptance criterion (``part`` splits a criterion)."""
    def record(number, passed, detail, part=""):
        verdict = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
        line = f"criterion {number}{part}: {verdict}  {detail}"
        ACCEPTANCE_LINES[(number, part)] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
