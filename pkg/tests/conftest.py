import numpy as np
import pytest

from isbci import dataio


def rand_spd(rng, c, scale=1.0):
    g = rng.standard_normal((c, c))
    return scale * (g @ g.T + c * np.eye(c))


@pytest.fixture
def tiny_trialset():
    cfg = dataio.SyntheticConfig(n_per_class=30, c=4, s=32, K=2, separation=2.0, seed=3)
    return dataio.gen_synthetic(cfg)


@pytest.fixture
def accept_trialset():
    # The desk-scale substitute dataset used by the acceptance suite.
    cfg = dataio.SyntheticConfig(n_per_class=100, c=8, s=128, K=2, separation=2.0, seed=7)
    return dataio.gen_synthetic(cfg)
