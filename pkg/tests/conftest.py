import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """``criterion(name, ok, detail)`` records an acceptance verdict, then asserts it."""
    def check(name: str, ok: bool, detail: str = ""):
        _RESULTS.append((name, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, f"{name}: {detail}"
    return check


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    passed = sum(ok for _, ok, _ in _RESULTS)
    terminalreporter.write_line(f"{passed}/{len(_RESULTS)} criteria passed")
