import pytest

_RESULTS: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    cid, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        verdict = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        # parametrized criteria pass only if every case passes
        previous = _RESULTS.get(cid, ("PASS", title))[0]
        if previous != "PASS":
            verdict = previous
        _RESULTS[cid] = (verdict, title)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_RESULTS, key=lambda c: int(c[2:])):
        verdict, title = _RESULTS[cid]
        terminalreporter.write_line(f"{verdict} {cid}: {title}")
