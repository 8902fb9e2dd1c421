import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pwspd.core import PointCloud, make_rng  # noqa: E402


@pytest.fixture
def rng():
    return make_rng(20240615)


def random_cloud(rng, n, dim=2, intrinsic=None):
    return PointCloud(rng.random((n, dim)), intrinsic or dim)


@pytest.fixture
def small_cloud(rng):
    return random_cloud(rng, 30)
