"""Collects the acceptance verdicts and prints one line per criterion at the end of the run."""

import pytest

# number -> {"title", "ok", "timed" (list of seconds), "limit"}
_VERDICTS: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when != "call" and report.outcome == "passed":
        return
    number, title = mark.args
    entry = _VERDICTS.setdefault(number, {"title": title, "ok": True, "timed": [], "limit": None})
    # a criterion split over several tests passes only if all of them pass
    entry["ok"] = entry["ok"] and report.outcome == "passed"
    props = dict(report.user_properties)
    if "timed_seconds" in props:
        entry["timed"].append(props["timed_seconds"])
        entry["limit"] = props["limit_seconds"]


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance")
    for number in sorted(_VERDICTS):
        e = _VERDICTS[number]
        if e["timed"]:
            worst = max(e["timed"])
            per = " per case" if len(e["timed"]) > 1 else ""
            timing = f"library {worst:.2f}s{per}, limit {e['limit']}s"
        else:
            timing = "no timing recorded"
        verdict = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {number:2d} {verdict}  {e['title']}  ({timing})")
