import numpy as np
import pytest

from stirapsim import build_basis

# acceptance tests append (criterion, passed, detail); printed at session end
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def idx1():
    return build_basis(1)


@pytest.fixture(scope="session")
def idx2():
    return build_basis(2)


@pytest.fixture
def acceptance_record():
    def record(criterion: int, passed: bool, detail: str):
        ACCEPTANCE_LINES.append((criterion, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(ACCEPTANCE_LINES):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {criterion:2d}: {status}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
