import numpy as np
import pytest

from gridquant.lcpf import FeederSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240812)


@pytest.fixture
def path_feeder():
    """0 -- 1 -- 2 chain with distinct r, x per line."""
    return FeederSpec(n=2, lines=((0, 1, 0.1, 0.05), (1, 2, 0.2, 0.1)))


@pytest.fixture
def star_feeder():
    """Three nodes all hanging off the slack."""
    return FeederSpec(
        n=3,
        lines=((0, 1, 0.1, 0.04), (0, 2, 0.2, 0.08), (0, 3, 0.3, 0.12)),
    )
