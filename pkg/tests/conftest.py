from __future__ import annotations

import pytest

from cubic_genus.cubic_enum import enumerate_table

# criterion number -> (passed, detail); printed at the end of the run
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def table_1e5():
    return enumerate_table(10**5, None)


@pytest.fixture(scope="session")
def table_1e6():
    return enumerate_table(10**6, None)


@pytest.fixture(scope="session")
def table_1e7():
    return enumerate_table(10**7, None)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_RESULTS


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
