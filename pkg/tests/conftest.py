import pytest

from fraccd.cd_analysis import select_witness

# (criterion number, passed, detail) lines filled in by test_acceptance
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture(scope="session")
def witness_beta1_ndim100():
    """Compactly supported profile violating CD(0, 100) at the origin for beta = 1."""
    return select_witness(1.0, 100.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
