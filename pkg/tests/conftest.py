from pathlib import Path

import pytest

from wordring.data import canonical_dataset, reference_frequencies

ROOT = Path(__file__).resolve().parents[1]

_criteria = {}


@pytest.fixture(scope="session")
def canonical():
    return canonical_dataset()


@pytest.fixture(scope="session")
def atlas():
    return reference_frequencies()


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    entry = _criteria.setdefault(number, {"title": title, "failed": [], "passed": 0})
    if report.outcome == "passed":
        entry["passed"] += 1
    else:
        entry["failed"].append(report.nodeid.split("::")[-1])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "FAIL" if entry["failed"] else "PASS"
        detail = f" ({', '.join(entry['failed'])})" if entry["failed"] else ""
        terminalreporter.write_line(f"[{status}] criterion {number}: {entry['title']}{detail}")
