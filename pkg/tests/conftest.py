import pytest

from rfiqkd.channel import ChannelParams
from rfiqkd.optimizer import OptimizerConfig, Scenario
from rfiqkd.params import ProtocolParams
from rfiqkd.security import SecurityConfig
from rfiqkd.statistics import FluctuationConfig


@pytest.fixture
def table1():
    return ChannelParams(eta=0.145, y0=3e-6, ed=0.015, alpha=0.2, beta=0.0)


@pytest.fixture
def baseline_params():
    return ProtocolParams.unbiased(mu=0.5, nu=0.1)


@pytest.fixture
def scenario_50km(table1):
    return Scenario(channel=table1, distance=50.0,
                    fluctuation=FluctuationConfig(1e11, 5.0), security=SecurityConfig())


@pytest.fixture
def fast_opt():
    return OptimizerConfig(n_starts=4, seed=7)


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion, then assert it."""

    def record(number, passed, detail):
        _ACCEPTANCE_LINES.append(f"[criterion {number}] {'PASS' if passed else 'FAIL'}: {detail}")
        return passed

    return record


@pytest.fixture
def note():
    def record(text):
        _ACCEPTANCE_LINES.append(f"    note: {text}")

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
