import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FULL_SUITE_BUDGET = 300.0  # seconds, checked under criterion 9

_criteria: dict[int, tuple[str, str]] = {}
_start = time.perf_counter()


def _record(number, title, ok):
    prev = _criteria.get(number, ("PASS", title))[0]
    _criteria[number] = ("PASS" if ok and prev == "PASS" else "FAIL", title)


def pytest_sessionstart(session):
    global _start
    _start = time.perf_counter()


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    _record(*marker, report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    elapsed = time.perf_counter() - _start
    if 9 in _criteria:
        _record(9, _criteria[9][1], elapsed < FULL_SUITE_BUDGET)
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title = _criteria[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
    terminalreporter.write_line(f"session wall time {elapsed:.1f}s (budget {FULL_SUITE_BUDGET:.0f}s)")
