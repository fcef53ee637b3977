import pytest

_RESULTS: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line, print it, then assert it."""

    def record(num: int, title: str, ok: bool, detail: str) -> None:
        _RESULTS[num] = (title, bool(ok), detail)
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title}: {detail}"
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        title, ok, detail = _RESULTS[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num}. {title}: {detail}")
