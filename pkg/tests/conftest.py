import numpy as np
import pytest

from softfinger.geometry import reference_geometry
from softfinger.hydraulic import HydraulicChamber
from softfinger.pneumatic import PneumaticModel


@pytest.fixture(scope="session")
def geom():
    return reference_geometry()


@pytest.fixture(scope="session")
def chamber():
    return HydraulicChamber()


@pytest.fixture(scope="session")
def pneu():
    return PneumaticModel()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
