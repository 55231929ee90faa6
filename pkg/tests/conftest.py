import pytest
from hypothesis import settings

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=50)
settings.load_profile("repro")

_ACCEPTANCE = {}


@pytest.fixture
def acceptance_log():
    def record(number, name, ok, detail):
        _ACCEPTANCE[number] = (name, ok, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        name, ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d} {name}: {detail}")
