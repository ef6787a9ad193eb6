"""Shared fixtures; prints the acceptance verdicts after the run."""
import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)`` for the terminal summary."""
    def record(criterion: int, passed: bool, detail: str):
        ACCEPTANCE[criterion] = (bool(passed), detail)
        print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[c]
        terminalreporter.write_line(f"criterion {c}: {'PASS' if passed else 'FAIL'}  {detail}")
