import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        previous = _CRITERIA.get(n, ("PASS", title))[0]
        status = "PASS" if report.passed and previous == "PASS" else "FAIL"
        _CRITERIA[n] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, title = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {title}")
