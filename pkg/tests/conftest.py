import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record ``(number, passed, detail)`` for the end-of-run criterion summary."""

    def record(number, passed, detail=""):
        _ACCEPTANCE[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
