import math

import pytest

from towlab.geometry.domain import Interval
from towlab.geometry.lattice import build_lattice
from towlab.geometry.params import GameParams


@pytest.fixture(scope='session')
def unit_interval():
    return Interval(0.0, 1.0)


@pytest.fixture(scope='session')
def coarse_lattice(unit_interval):
    """eps = 1/4, k = 4: spacing 1/16 is exact in binary, 15 interior and 6 strip nodes."""
    return build_lattice(unit_interval, 0.25, refinement=4)


@pytest.fixture(scope='session')
def params_p2():
    return GameParams(1, 2.0, 0.25)


@pytest.fixture(scope='session')
def params_p3():
    return GameParams(1, 3.0, 0.25)


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv('TOWLAB_OUTPUT_DIR', str(tmp_path))
    return tmp_path


def finite(x):
    return x is not None and not math.isnan(x)
