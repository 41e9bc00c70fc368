import os
from math import sqrt

import numpy as np
import pytest

from xtal_acoustics.crystal.assembly import Crystal, assemble_crystal
from xtal_acoustics.crystal.lattice import Lattice
from xtal_acoustics.io import load_crystal


@pytest.fixture(autouse=True)
def setup_test_env():
    """Keep worker pools small and logs quiet during tests."""
    os.environ["XTAL_THREADS"] = "2"
    os.environ["XTAL_LOGGING_LEVEL"] = "WARNING"
    yield
    for key in ("XTAL_THREADS", "XTAL_LOGGING_LEVEL"):
        os.environ.pop(key, None)


def _bundled(name: str) -> Crystal:
    return assemble_crystal(load_crystal(name))


@pytest.fixture
def square() -> Crystal:
    """Bouquet of two loops: the square crystal, normalized forces."""
    return _bundled("bouquet")


@pytest.fixture
def honeycomb() -> Crystal:
    """Theta graph: the honeycomb crystal, normalized forces."""
    return _bundled("theta")


@pytest.fixture
def diamond() -> Crystal:
    """K4: the diamond crystal, normalized forces."""
    return _bundled("k4")


@pytest.fixture
def chain() -> Crystal:
    return _bundled("chain")


@pytest.fixture(params=["bouquet", "theta", "k4", "chain"])
def bundled(request) -> Crystal:
    """Every bundled crystal."""
    return _bundled(request.param)


@pytest.fixture
def z2() -> Lattice:
    return Lattice(np.eye(2))


@pytest.fixture
def hexagonal() -> Lattice:
    return Lattice(np.array([[1.0, 0.5], [0.0, sqrt(3) / 2]]))


@pytest.fixture
def rect() -> Lattice:
    return Lattice(np.diag([2.0, 1.0]))
