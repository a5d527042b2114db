import numpy as np
import pytest

from whithamlab.spectral import Field, PeriodicGrid, random_field


@pytest.fixture
def grid():
    return PeriodicGrid(256)


@pytest.fixture
def small():
    """2*pi torus, handy for single-mode checks."""
    return PeriodicGrid(64, 2 * np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def rfield(grid, rng):
    def make(scale=0.5, k0=1.0):
        return random_field(grid, rng, scale=scale, k0=k0)

    return make


def bump(grid, amp=1.0, width=3.0, shift=0.0, kind="hat"):
    y = (grid.nodes - grid.length / 2 - shift) / width
    if kind == "hat":
        return Field(grid, amp * (1 - 2 * y**2) * np.exp(-(y**2)))
    return Field(grid, amp * np.exp(-(y**2)))
