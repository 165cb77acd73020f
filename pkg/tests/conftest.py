"""Shared fixtures and random-state helpers."""

import numpy as np
import pytest

from nongauss.lincore import DensityMatrix, FockSpec, PureState


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_pure(rng, dim, modes=1):
    if modes == 1:
        spec = FockSpec((dim,))
    else:
        spec = FockSpec((dim,) * modes)
    v = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    v /= np.linalg.norm(v)
    return PureState(spec, v)


def random_density(rng, dim, rank=None):
    """Ginibre-style random mixed state of the given dimension."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityMatrix(FockSpec((dim,)), m)


def random_even_pure(rng, dim):
    """Random pure state supported on even Fock levels (exactly zero mean)."""
    v = np.zeros(dim, dtype=complex)
    evens = np.arange(0, dim, 2)
    v[evens] = rng.normal(size=evens.size) + 1j * rng.normal(size=evens.size)
    v /= np.linalg.norm(v)
    return PureState(FockSpec((dim,)), v)
