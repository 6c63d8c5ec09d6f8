import pytest
from hypothesis import HealthCheck, settings

from kgchannels.config import ScenarioConfig
from kgchannels.fields import SpatialGrid
from kgchannels.green import KGParams

settings.register_profile(
    "kg",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("kg")


@pytest.fixture(scope="session")
def grid64():
    return SpatialGrid(2, 64, 1.6)


@pytest.fixture(scope="session")
def params64(grid64):
    return KGParams(1.0, grid64)


@pytest.fixture(scope="session")
def params128():
    return KGParams(1.0, SpatialGrid(2, 128, 1.6))


@pytest.fixture(scope="session")
def cfg():
    return ScenarioConfig.default(2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num][1])
