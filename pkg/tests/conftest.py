import numpy as np
import pytest

from lbde.rng import make_rng


@pytest.fixture
def rng():
    return make_rng(2024)


def batch_se(x, n_batches=100):
    """Batch-means standard error for a (possibly autocorrelated) chain."""
    x = np.asarray(x, dtype=float)
    size = x.size // n_batches
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(n_batches))


def ks_critical(n, alpha_one_percent=True):
    """Large-sample Kolmogorov-Smirnov critical value at alpha ~ 0.01."""
    return 1.63 / np.sqrt(n)
