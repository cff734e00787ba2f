import numpy as np
import pytest

from sirgld.epi_data import EpidemicSeries
from sirgld.simulate import GldScenario, SirScenario, simulate

# N = 10,000, lambda = 2e-5, gamma = 0.1, 10 initial cases, 120 days
SIR_TRUTH = SirScenario()
# final size 70,000; infections follow GLD(sigma=5, mu=30, beta=0.8), removal rate 0.05
GLD_TRUTH = GldScenario()
# R0 = 10, so the final size is within 0.01% of N
HIGH_R0 = SirScenario(N=70_000, lam=10 * 0.05 / 70_000, gamma=0.05, I0=5, days=200)


@pytest.fixture(scope="session")
def sir_exact():
    """Noiseless SIR curves kept as floats."""
    T, R = SIR_TRUTH.curves()
    return EpidemicSeries.from_cumulative(T, R)


@pytest.fixture(scope="session")
def sir_counts():
    return simulate(SIR_TRUTH)


@pytest.fixture(scope="session")
def gld_counts():
    return simulate(GLD_TRUTH)


@pytest.fixture(scope="session")
def high_r0_counts():
    return simulate(HIGH_R0)


def day_reaching(series, fraction):
    """First day the cumulative count reaches ``fraction`` of its final value."""
    T = series.cum_infected
    return float(series.days[np.argmax(T >= fraction * T[-1])])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
