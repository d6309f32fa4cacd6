import pytest

_verdicts: list[tuple[str, bool, str]] = []


@pytest.fixture
def verdict():
    """Record one acceptance line; the test still asserts on its own."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        _verdicts.append((name, ok, detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _verdicts:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
