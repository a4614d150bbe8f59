"""Shared pytest plumbing.

test_acceptance.py records one PASS/FAIL line per criterion here so the
checklist is printed after the run even with output capture on.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance checklist")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
