"""Shared fixtures for the test suite."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.integrals import h2_integrals
from src.core.qedfci import CavitySpec


@pytest.fixture(scope='session')
def h2():
    """H₂/STO-3G at 0.74 Å along the field."""
    return h2_integrals(0.74)


@pytest.fixture(scope='session')
def h2_perpendicular():
    return h2_integrals(0.74, np.pi / 2)


@pytest.fixture
def cavity():
    return CavitySpec(omega=1.0, coupling=0.05, n_b_max=3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, dim, k=None):
    shape = (dim,) if k is None else (dim, k)
    v = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return v / np.linalg.norm(v, axis=0)


def assert_equal_up_to_phase(a, b, atol=1e-12):
    """Compare two arrays after removing a global phase."""
    a, b = np.asarray(a), np.asarray(b)
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    phase = a[k] / b[k]
    np.testing.assert_allclose(abs(phase), 1.0, atol=atol)
    np.testing.assert_allclose(a, phase * b, atol=atol)
