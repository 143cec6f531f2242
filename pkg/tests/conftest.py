import numpy as np
import pytest

from skewflect import build_tridiagonal_skew, cube, unit_ball


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(params=["ball", "box"])
def body3(request):
    return unit_ball(3) if request.param == "ball" else cube(3)


@pytest.fixture
def J1():
    return build_tridiagonal_skew(3, 1.0)
