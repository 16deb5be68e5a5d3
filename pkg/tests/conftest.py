import numpy as np
import pytest

from hevfl.params import preset
from hevfl.rlwe.backend import RlweBackend


@pytest.fixture(scope="session")
def desk_backend() -> RlweBackend:
    """One lattice backend at the desk-scale preset, shared across the run.

    Key material is per-test (tests call ``keygen`` with the offsets they
    need); the backend object itself carries no mutable op state beyond the
    key table, so sharing it is safe and saves the NTT setup cost.
    """
    return RlweBackend(preset("desk-1024"))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xC0FFEE)
