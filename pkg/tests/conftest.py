import pytest

_ACCEPTANCE = {}


@pytest.fixture
def report_criterion():
    """Record a one-line verdict for an acceptance criterion."""

    def record(number, title, passed, detail):
        _ACCEPTANCE[number] = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
