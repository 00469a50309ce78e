import hypothesis
import numpy as np
import pytest

np.seterr(all="warn", under="ignore")

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def log(criterion, passed, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
