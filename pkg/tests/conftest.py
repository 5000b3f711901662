import numpy as np
import pytest

ACCEPTANCE_LINES = []


def random_symmetric(rng, m, n, scale=1.0):
    a = rng.standard_normal((m, n, n)) * scale
    return 0.5 * (a + a.transpose(0, 2, 1))


def random_antisymmetric(rng, m, n):
    a = rng.standard_normal((m, n, n))
    return 0.5 * (a - a.transpose(0, 2, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_log():
    def log(criterion, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
