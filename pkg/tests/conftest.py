import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_state(L, seed=0, real=False):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(1 << L)
    if not real:
        v = v + 1j * rng.standard_normal(1 << L)
    return (v / np.linalg.norm(v)).astype(complex)


def parity_even(psi):
    v = psi + psi[::-1]
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
