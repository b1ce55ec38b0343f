import numpy as np
import pytest


@pytest.fixture
def two_points():
    return np.array([[0.0, 2.0], [0.0, -2.0]]), np.array([1.0, -1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration in _acceptance:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  ({duration:.2f}s)")
