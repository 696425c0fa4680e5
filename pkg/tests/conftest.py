import functools

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

CRITERIA: dict = {}


@pytest.fixture
def record_criterion():
    """Record (criterion number, passed, detail); the terminal summary prints one line each."""
    def record(number: int, passed: bool, detail: str):
        CRITERIA[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(CRITERIA):
        passed, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


@functools.lru_cache(maxsize=None)
def continued(s: complex):
    """Pipeline result at s with the default configuration (shared across test modules)."""
    from eisencont.sl2 import continue_eisenstein
    return continue_eisenstein(s)


@functools.lru_cache(maxsize=None)
def default_pole_report():
    from eisencont.sl2 import locate_pole
    return locate_pole()
