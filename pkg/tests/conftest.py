import numpy as np
import pytest

from scrollforge import build_example1_double, build_example1_triple, build_example2_triple


@pytest.fixture(scope="session")
def ex1_double():
    return build_example1_double()


@pytest.fixture(scope="session")
def ex1_triple():
    return build_example1_triple()


@pytest.fixture(scope="session")
def ex2_triple():
    return build_example2_triple()


@pytest.fixture(scope="session")
def a_ex1():
    return np.array([[0.5, -10.0, 0.0], [10.0, 0.5, 0.0], [0.0, 0.0, 0.0]])


@pytest.fixture(scope="session")
def a_ex2():
    return np.array([[0.5, -10.0, 0.0], [10.0, 0.5, 0.0], [0.0, 0.0, 0.1]])


_acceptance = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        detail = dict(report.user_properties).get("detail", "")
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail in _acceptance:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  {detail}")
