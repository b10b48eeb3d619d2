"""Shared fixtures. Session-scoped so rasterization and mollification of the
standard N=512 shapes happen once for the whole run."""

import numpy as np
import pytest

from perimetry.geometry import Difference, Disk, Rect, rasterize
from perimetry.grids import GridSpec
from perimetry.mollify import mollify2d


@pytest.fixture(scope="session")
def spec512():
    return GridSpec(512, 2.0)


@pytest.fixture(scope="session")
def spec256():
    return GridSpec(256, 2.0)


@pytest.fixture(scope="session")
def disk512(spec512):
    return rasterize(Disk((0.0, 0.0), 0.3), spec512)


@pytest.fixture(scope="session")
def square512(spec512):
    return rasterize(Rect((0.0, 0.0), (0.3, 0.3)), spec512)


@pytest.fixture(scope="session")
def holed512(spec512):
    return rasterize(
        Difference(Disk((0.0, 0.0), 0.3), Rect((0.0, 0.0), (0.08, 0.08))), spec512
    )


@pytest.fixture(scope="session")
def disk256(spec256):
    return rasterize(Disk((0.0, 0.0), 0.3), spec256)


@pytest.fixture(scope="session")
def disk_field512(disk512):
    return mollify2d(disk512, 0.02)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
