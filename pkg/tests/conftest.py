import numpy as np
import pytest

from dcbattery.domain import BatterySpec, RegulationSeries, Tariff, TraceSeries

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


@pytest.fixture
def hour_tariff():
    """Prices already per one-hour step."""
    return Tariff(lambda_elec=1.0, lambda_peak=10.0, lambda_c=10.0, lambda_b=0.1, lambda_mis=6.0)


@pytest.fixture
def big_battery():
    return BatterySpec(power_cap=1.0, energy_cap=10.0, soc_ini=0.5, soc_min=0.0, soc_max=1.0)


def hourly_trace(values):
    return TraceSeries(np.asarray(values, float), 3600.0)


def hourly_reg(values):
    return RegulationSeries(np.asarray(values, float), 3600.0)
