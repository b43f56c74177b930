"""Shared fixtures and the per-criterion summary for the acceptance suite."""
import re

import pytest

_CRITERIA: dict[int, list[str]] = {}
_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    outcomes = _CRITERIA.setdefault(int(m.group(1)), [])
    if report.when == "call" or report.outcome != "passed":
        outcomes.append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        outcomes = _CRITERIA[number]
        status = "PASS" if outcomes and all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240601)
