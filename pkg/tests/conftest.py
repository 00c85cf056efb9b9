"""Collects acceptance-criterion outcomes and prints one line per criterion."""
import pytest

_RESULTS: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    number, title = mark.args
    status = "PASS" if report.passed else "FAIL"
    detail = ""
    if report.failed and call.excinfo is not None:
        detail = str(call.excinfo.value).splitlines()[0][:160] if str(call.excinfo.value) else call.excinfo.typename
    if status == "FAIL" or number not in _RESULTS:
        _RESULTS[number] = (status, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title, detail = _RESULTS[number]
        line = f"criterion {number:2d} {status}: {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
