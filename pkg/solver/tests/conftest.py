import os
import sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../src")))

import pytest
from spectral.geometry import HalfSphereMesh, default_grading


@pytest.fixture
def small_shape() -> tuple[int, int]:
    """Extension mesh cells small enough for unit tests."""
    return (64, 32)


@pytest.fixture
def half_sphere_mesh():
    def build(theta: float, s: float, shape: tuple[int, int] = (64, 32)) -> HalfSphereMesh:
        return HalfSphereMesh.build(theta, shape[0], shape[1], default_grading(s))
    return build
