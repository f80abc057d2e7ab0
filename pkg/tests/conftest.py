"""Collects the acceptance results and prints one line per criterion."""

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title, budget): acceptance criterion with a runtime budget in seconds"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    number, title, budget = mark.args
    entry = _RESULTS.setdefault(number, {"title": title, "budget": budget, "passed": True, "detail": "", "elapsed": None})
    entry["passed"] &= rep.passed
    props = dict(item.user_properties)
    entry["detail"] = props.get("detail", entry["detail"])
    entry["elapsed"] = props.get("elapsed", entry["elapsed"])
    if rep.failed and not entry["detail"]:
        entry["detail"] = rep.longrepr.reprcrash.message.splitlines()[0] if hasattr(rep.longrepr, "reprcrash") else "error"


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS):
        e = _RESULTS[number]
        status = "PASS" if e["passed"] else "FAIL"
        t = "n/a" if e["elapsed"] is None else f"{e['elapsed']:.2f} s"
        tr.write_line(f"[{status}] {number:>2}. {e['title']}: {e['detail']} (runtime {t}, budget {e['budget']} s)")
