"""Shared test plumbing: the acceptance-criteria scoreboard.

Tests in test_acceptance.py wrap their body in ``with criterion(n, "...")``.
The hook below prints one PASS/FAIL line per criterion at the end of the
run, whether or not stdout capture is on.
"""

from contextlib import contextmanager

import pytest

ACCEPTANCE = {}


@pytest.fixture
def criterion():
    @contextmanager
    def _criterion(num, summary):
        ACCEPTANCE[num] = (False, summary)
        yield
        ACCEPTANCE[num] = (True, summary)

    return _criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        passed, summary = ACCEPTANCE[num]
        word = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {word} - {summary}")
