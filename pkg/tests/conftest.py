import numpy as np
import pytest


def random_spd(rng, n, floor=0.1):
    a = rng.standard_normal((n, n))
    return a @ a.T + floor * np.eye(n)


def joint_gaussian(rng, n):
    """Mean pair and a valid joint covariance for (X, Y) in R^n x R^n."""
    big = random_spd(rng, 2 * n, floor=0.05)
    mean = rng.normal(0, 2, size=2 * n)
    return mean[:n], mean[n:], big[:n, :n], big[n:, n:], big[:n, n:]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance verdicts collected by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
