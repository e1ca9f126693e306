import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def adjacent_corr(V, pairs):
    V = np.asarray(V, dtype=float)
    out = []
    for a, b in pairs:
        x, y = V[:, a], V[:, b]
        if x.std() == 0 or y.std() == 0:
            continue
        out.append(np.corrcoef(x, y)[0, 1])
    return float(np.mean(out))


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary."""

    def _report(tag, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {tag}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
