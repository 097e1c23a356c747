from __future__ import annotations

import re

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_results: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = m.group(1)
    if report.failed:
        _results[key] = (m.group(2), "FAIL")
    elif report.when == "call" and key not in _results:
        _results[key] = (m.group(2), "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results):
        name, verdict = _results[key]
        terminalreporter.write_line(f"criterion {int(key):2d} {name}: {verdict}")


@pytest.fixture(scope="session")
def lam():
    from fractions import Fraction

    return Fraction(132, 25)


@pytest.fixture(scope="session")
def family(lam):
    from slopelab.lifts import make_F_lambda

    return make_F_lambda(lam)
