"""Shared pytest wiring for the acceptance gate.

``test_acceptance.py`` summarizes the rest of the suite (criterion 10), so its
tests are pushed to the end of the collection and every other test's outcome
is recorded here. The one-line ACCEPTANCE verdicts are echoed after the run so
they are visible even when capture is on.
"""

import sys

OUTCOMES: list[tuple[str, str]] = []


def pytest_collection_modifyitems(session, config, items):
    # stable sort: keep declaration order, move the acceptance gate last
    items.sort(key=lambda item: item.path.name == "test_acceptance.py")


def pytest_runtest_logreport(report):
    if report.when == "call":
        OUTCOMES.append((report.nodeid, report.outcome))
    elif report.outcome == "failed":
        OUTCOMES.append((report.nodeid, "error"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance verdicts")
        for line in lines:
            terminalreporter.write_line(line)
