import numpy as np
import pytest

from fracvar.filters import Filter

CORPUS = [
    Filter((-1, 1)),
    Filter((-1, 0, 1)),
    Filter((1, -2, 1)),
    Filter((1, 0, -2, 0, 1)),
    Filter((1, -3, 3, -1)),
]
H_GRID = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


def brute_fbm_cov(s, t, h):
    """fBm covariance written independently of the package."""
    return 0.5 * (t ** (2 * h) + s ** (2 * h) - abs(t - s) ** (2 * h))


def gram_filter_cov(coeffs, delta, h, lag, start=6):
    """a^T C a from the raw fBm covariance of two filter windows ``lag`` apart."""
    total = 0.0
    for k, ak in enumerate(coeffs):
        for l, al in enumerate(coeffs):
            s = (start + k) * delta
            t = (start + lag + l) * delta
            total += ak * al * brute_fbm_cov(s, t, h)
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
