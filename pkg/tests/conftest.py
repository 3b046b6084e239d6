"""Shared fixtures, plus a one-line-per-criterion summary for the acceptance suite."""

from __future__ import annotations

import re

import pytest

from bratteli_irs.diagram import all_ones, odometer, polynomial_example
from bratteli_irs.measure import stationary_measure

_CRITERIA: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = re.match(r"test_ac(\d+)_", item.name)
    if not m or (rep.when != "call" and rep.passed):
        return
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    key = f"AC{int(m.group(1))}"
    prev = _CRITERIA.get(key, ("PASS", doc))[0]
    status = "PASS" if rep.passed and prev == "PASS" else "FAIL"
    if rep.skipped:
        status = "SKIP"
    _CRITERIA[key] = (status, doc)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k[2:])):
        status, doc = _CRITERIA[key]
        terminalreporter.write_line(f"{key:<5} {status}  {doc}")


@pytest.fixture(scope="session")
def odo():
    return odometer(2)


@pytest.fixture(scope="session")
def ones():
    return all_ones(2)


@pytest.fixture(scope="session")
def poly():
    return polynomial_example()


@pytest.fixture(scope="session")
def odo_mu(odo):
    return stationary_measure(odo, 10, "rational")


@pytest.fixture(scope="session")
def ones_mu(ones):
    return stationary_measure(ones, 10, "rational")


@pytest.fixture(scope="session")
def request_diagrams(odo, ones, poly):
    return {"odo": odo, "ones": ones, "poly": poly}
