import pytest

_RESULTS = []


@pytest.fixture
def criterion():
    """Record an acceptance check: ``criterion(label, passed, detail)`` then assert on it."""

    def record(label, passed, detail=""):
        _RESULTS.append((label, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
