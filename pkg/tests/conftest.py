import pytest

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    def record(number: int, failures: list[str], summary: str):
        detail = summary if not failures else "; ".join(failures[:4]) + (
            f" (+{len(failures) - 4} more)" if len(failures) > 4 else ""
        )
        ACCEPTANCE[number] = (not failures, detail)
        return not failures

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
