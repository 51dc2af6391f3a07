import warnings

import pytest
from hypothesis import HealthCheck, settings

from lwrcross.multi import BoundaryWarning

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _quiet_boundary():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryWarning)
        yield


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion; printed at the end of the session."""

    def record(k: int, passed: bool, detail: str) -> bool:
        line = f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        _CRITERIA[k] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
