import pytest

from kgraph import fixtures as fx

# Acceptance results collected by tests/test_acceptance.py, printed at the end of the run.
ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def ex43():
    return fx.ex43(2)


@pytest.fixture
def loops():
    return fx.loops(2)


@pytest.fixture
def free2():
    return fx.free2(2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
