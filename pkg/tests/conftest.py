import pytest

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Register an acceptance outcome: ``record(criterion, ok, detail)``."""
    def _record(criterion, ok, detail):
        prev = ACCEPTANCE.get(criterion)
        if prev is not None:
            ok = ok and prev[0]
            detail = f"{prev[1]}; {detail}"
        ACCEPTANCE[criterion] = (bool(ok), detail)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
