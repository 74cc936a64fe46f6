import numpy as np
import pytest

from phasefisher import fock


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_pure(rng, dim, headroom=0):
    """Random state supported below dim - headroom (clean truncation tail)."""
    amps = np.zeros(dim, dtype=complex)
    top = dim - headroom
    amps[:top] = rng.normal(size=top) + 1j * rng.normal(size=top)
    return amps / np.linalg.norm(amps)


def random_density(rng, dim, rank=3, headroom=8):
    """Random mixed state as a convex mix of random pure states."""
    headroom = min(headroom, dim - 4)
    weights = rng.dirichlet(np.ones(rank))
    mat = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        psi = random_pure(rng, dim, headroom)
        mat += w * np.outer(psi, psi.conj())
    return fock.DensityMatrix(mat, dim)
