"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

import pytest

RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    prev = RESULTS.get(number, (title, True, 0.0))
    if report.when == "call" or report.failed:
        RESULTS[number] = (title, prev[1] and not report.failed, prev[2] + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        title, ok, seconds = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2} {title}: {'PASS' if ok else 'FAIL'} ({seconds:.2f} s)")
