import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        num, title = mark.args
        prev = _results.get(num, (title, True, ""))
        extra = getattr(item, "criterion_note", "")
        _results[num] = (title, prev[1] and rep.passed, extra or prev[2])


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        title, ok, note = _results[num]
        line = f"CRITERION {num} {'PASS' if ok else 'FAIL'} {title}"
        terminalreporter.write_line(line + (f" ({note})" if note else ""))
