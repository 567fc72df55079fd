import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")
_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.failed:
        _results[k] = ("FAIL", report.nodeid)
    elif report.when == "call" and k not in _results:
        _results[k] = ("PASS" if report.passed else "SKIP", report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        status, nodeid = _results[k]
        terminalreporter.write_line(f"criterion {k}: {status}  {nodeid.split('::')[-1]}")
