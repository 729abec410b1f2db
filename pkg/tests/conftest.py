import numpy as np
import pytest

from cgbound.distributions import GaussianMixture
from cgbound.empirical import FitTarget, build_ecdf

# the two reference heavy-tailed mixtures used throughout
ZERO_MEAN_BGMM = GaussianMixture.of((0.9, 0.0, 1.0), (0.1, 0.0, 10.0))
BIASED_BGMM = GaussianMixture.of((0.9, 0.0, 1.0), (0.1, 1.0, 10.0))

TABLE3_SEED = 12345
TABLE3_N = 100_000


@pytest.fixture(scope="session")
def zero_mean_bgmm():
    return ZERO_MEAN_BGMM


@pytest.fixture(scope="session")
def biased_bgmm():
    return BIASED_BGMM


@pytest.fixture(scope="session")
def zero_mean_target():
    """Analytic constraint view of the zero-mean reference mixture."""
    return FitTarget.from_distribution(ZERO_MEAN_BGMM)


@pytest.fixture(scope="session")
def table3_samples():
    return BIASED_BGMM.sample(TABLE3_N, seed=TABLE3_SEED)


@pytest.fixture(scope="session")
def table3_target(table3_samples):
    return FitTarget.from_ecdf(build_ecdf(table3_samples))
