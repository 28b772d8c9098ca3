import time

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def timer():
    """Returns elapsed(), the seconds since the test body started."""
    t0 = time.perf_counter()
    return lambda: time.perf_counter() - t0


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        number, title = m.args
        detail = dict(item.user_properties).get("detail", "")
        _RESULTS[number] = (title, "PASS" if rep.passed else "FAIL", rep.duration, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status, dur, detail = _RESULTS[number]
        extra = f"  [{detail}]" if detail else ""
        terminalreporter.write_line(f"{status} {number:>2}. {title} ({dur:.1f} s){extra}")
