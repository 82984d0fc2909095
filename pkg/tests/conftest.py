import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(number: int, ok, detail: str) -> None:
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        ACCEPTANCE_LINES.append(f"criterion {number}: {status} {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
