import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dtmint import build_space
from dtmint.quasi_integral import agreement_stats
from dtmint.scenarios import builtin

settings.register_profile("dtmint", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dtmint")


@pytest.fixture(scope="session")
def zoo():
    return builtin("zoo")


@pytest.fixture
def small():
    return build_space(8, 6, (0, 7, 0, 5))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    terminalreporter.write_sep("-", "strict/weak quadrature agreement")
    terminalreporter.write_line(
        f"integrals computed: {agreement_stats.count}, largest strict/weak gap: {agreement_stats.max_gap:.3e}"
    )
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)


def pytest_sessionfinish(session, exitstatus):
    # strict/weak agreement must hold for every integral of the run, not only
    # those computed before the acceptance test that checks it
    if agreement_stats.max_gap > 1e-12:
        session.exitstatus = 1
