import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the test still asserts on its own."""
    def record(number, title, ok, elapsed, detail=""):
        status = "PASS" if ok else "FAIL"
        line = f"criterion {number} {status} {title} ({elapsed:.2f}s)"
        if detail:
            line += f": {detail}"
        ACCEPTANCE_LINES.append((str(number), line))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
