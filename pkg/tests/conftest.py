import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_equivalent(h, rng):
    """D1 P1 H P2 D2 with random permutations and phases."""
    a = np.asarray(h.entries if hasattr(h, "entries") else h)
    n = a.shape[0]
    p1, p2 = rng.permutation(n), rng.permutation(n)
    d1 = np.exp(2j * np.pi * rng.random(n))
    d2 = np.exp(2j * np.pi * rng.random(n))
    return d1[:, None] * a[np.ix_(p1, p2)] * d2[None, :]
