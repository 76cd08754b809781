import numpy as np
import pytest

RING = [[6, 3], [12, 9]]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ring():
    return np.array(RING)


_CRITERIA = {}


@pytest.fixture(scope="session")
def record_criterion():
    """Log a one-line verdict for an acceptance criterion; shown in the terminal summary."""
    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}"
        _CRITERIA[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
