import pytest

# criterion number -> (passed, detail); filled by the acceptance module
VERDICTS = {}


@pytest.fixture
def verdict():
    def record(n, ok, detail=""):
        VERDICTS[n] = (bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(VERDICTS):
        ok, detail = VERDICTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
