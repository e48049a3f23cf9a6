import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def report():
    """Record one summary line per acceptance criterion."""
    def _report(number: int, title: str, ok: bool, detail: str = ""):
        _CRITERIA[number] = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (
            f"  [{detail}]" if detail else "")
        print(_CRITERIA[number])
    return _report


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[k])
