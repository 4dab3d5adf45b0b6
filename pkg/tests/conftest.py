"""Collects one PASS/FAIL line per acceptance criterion and prints them at the end of the run."""

import pytest

_CRITERIA: dict[str, tuple[int, str]] = {}
_OUTCOMES: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion covered by the test")


def pytest_collection_finish(session):
    for item in session.items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _CRITERIA[item.nodeid] = (mark.args[0], mark.args[1])


def pytest_runtest_logreport(report):
    if report.nodeid not in _CRITERIA:
        return
    n, _ = _CRITERIA[report.nodeid]
    if report.when == "call" or report.failed or report.skipped:
        _OUTCOMES.setdefault(n, []).append(report.passed and report.when == "call")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    texts = {}
    for n, text in _CRITERIA.values():
        texts.setdefault(n, text)
    for n in sorted(texts):
        results = _OUTCOMES.get(n)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status} - {texts[n]}")


@pytest.fixture
def report_line(capsys):
    """Prints a detail line that survives output capture."""

    def emit(text):
        with capsys.disabled():
            print(f"\n  {text}")

    return emit
