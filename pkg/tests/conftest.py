import pytest

from cmapopt.colormaps import builtin_colormap
from cmapopt.cvd import CvdSpec


@pytest.fixture(scope="session")
def viridis():
    return builtin_colormap("viridis")


@pytest.fixture(scope="session")
def jet():
    return builtin_colormap("jet")


@pytest.fixture(scope="session")
def grayscale():
    return builtin_colormap("grayscale-jp")


@pytest.fixture(scope="session")
def cividis():
    return builtin_colormap("cividis")


@pytest.fixture(scope="session")
def deut100():
    return CvdSpec("deuteranomaly", 100.0)
