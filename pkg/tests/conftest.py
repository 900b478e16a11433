import time

import pytest

_LINES = {}
_START = time.perf_counter()


class AcceptanceLog:
    def record(self, number: int, ok: bool, detail: str) -> None:
        _LINES[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.fixture(scope="session")
def acceptance_log():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_LINES):
        terminalreporter.write_line(_LINES[k])
    elapsed = time.perf_counter() - _START
    terminalreporter.write_line(f"session wall time {elapsed:.1f} s (budget 60 s): {'PASS' if elapsed < 60 else 'FAIL'}")
