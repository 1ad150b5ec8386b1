import numpy as np
import pytest

from isac_subspace import Scenario, draw_rayleigh_channel


@pytest.fixture
def scn():
    return Scenario()


@pytest.fixture
def channel(scn):
    return draw_rayleigh_channel(scn.seed, scn.n_t, normalize=True)


def random_psd(rng, n, trace=1.0, rank=None):
    rank = n if rank is None else rank
    G = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    R = G @ G.conj().T
    return R * trace / np.trace(R).real


def index_sum_norm_sq(theta, n):
    """||a_dot||^2 by direct summation over centered element indices."""
    return sum((np.pi * (m - (n - 1) / 2) * np.cos(theta)) ** 2 for m in range(n)) / n
