import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Log one acceptance line and return whether the criterion passed."""

    def _record(criterion, passed, detail):
        ACCEPTANCE_LINES.append(f"[criterion {criterion}] {'PASS' if passed else 'FAIL'}: {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
