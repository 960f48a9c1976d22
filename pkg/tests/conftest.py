from __future__ import annotations

import pytest

_ACCEPTANCE_LINES: list[str] = []


class AcceptanceLog:
    def record(self, number: int, name: str, ok: bool, detail: str) -> bool:
        line = f"[{number:>2}] {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok


@pytest.fixture(scope="session")
def acceptance() -> AcceptanceLog:
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
