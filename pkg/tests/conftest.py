import pytest

from glome import chart, geodesics
from glome.suites import RunConfig, run_all


@pytest.fixture(scope="session")
def default_report():
    """Full verification report at the standard configuration (shared)."""
    return run_all(RunConfig())


@pytest.fixture(scope="session")
def standard_trajectory():
    """The canonical mixed-slope geodesic used across modules."""
    j0 = chart.jet1(0.0, 0.0, 0.0, 0.4, 0.7)
    return geodesics.integrate(j0, 0.8, 1e-3)


@pytest.fixture(scope="session")
def planar_trajectory():
    """A v_x = 0 geodesic (stays on the 2-sphere slice)."""
    j0 = chart.jet1(0.0, 0.3, 1.0, 0.4, 0.0)
    return geodesics.integrate(j0, 0.8, 1e-3)
