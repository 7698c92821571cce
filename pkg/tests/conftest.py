import numpy as np
import pytest

from ptphase import dense
from ptphase.tripartition import Tripartition


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_density_matrix(dim, rng, rank=None):
    """Wishart-style random mixed state."""
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / rho.trace()


def haar_reduced(t: Tripartition, rng) -> dense.DensityMatrix:
    vec = dense.haar_state_vector(t.n, rng)
    return dense.reduce_to_ab(dense.PureState(vec, t))


@pytest.fixture
def bell_dm():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    return dense.DensityMatrix(np.outer(psi, psi.conj()), 1, 1)
