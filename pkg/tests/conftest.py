import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from optpwm import RlBranch, SinglePhaseConfig, ThreePhaseConfig

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def cfg11():
    return SinglePhaseConfig(Vo=300.0, f=60.0, m=0.9, N=11)


@pytest.fixture
def cfg3p():
    return ThreePhaseConfig(Vo=300.0, f=60.0, m=0.9, P=11)


@pytest.fixture
def branch():
    return RlBranch(R=1.0, L=100e-6)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not (mod.RESULTS or mod.INFO):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
    for line in mod.INFO:
        terminalreporter.write_line(line)
