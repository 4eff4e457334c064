import numpy as np
import pytest


def random_sym(n, rng, lo=-1.0, hi=1.0):
    """Random symmetric matrix with spectrum in [lo, hi], independent of opbell's generator."""
    z = rng.standard_normal((n, n))
    q, _ = np.linalg.qr(z)
    return (q * rng.uniform(lo, hi, n)) @ q.T


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
