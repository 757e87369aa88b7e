import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from prhartree import Field, Lattice, ProblemSpec, Yukawa  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def lat3():
    return Lattice(3, 16, 8.0)


@pytest.fixture(scope="session")
def yukawa_spec(lat3):
    return ProblemSpec(lat3, 1.0, 2.0, 1.0, Yukawa(1.0))


def random_field(lattice, rng, smooth=True):
    """White noise, optionally low-passed so pointwise products stay resolved."""
    v = rng.standard_normal(lattice.shape)
    if smooth:
        F = np.fft.fftn(v) * np.exp(-lattice.k_squared)
        v = np.real(np.fft.ifftn(F))
        v /= np.abs(v).max()
    return Field(lattice, v)


def gaussian_bump(lattice, width=1.0, center=0.0):
    r2 = lattice.distance(center) ** 2 if center is not None else lattice.radius**2
    return Field(lattice, np.exp(-r2 / (2 * width**2)))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
