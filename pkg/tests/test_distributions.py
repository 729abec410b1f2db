import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cgbound.distributions import (
    MIN_CAUCHY_OVER_GAUSS_RATIO,
    Cauchy,
    CgcmHalf,
    Gaussian,
    GaussianMixture,
    MaxCdf,
    MinCdf,
    MirroredCdf,
    ScaledCdf,
    from_config,
    paired_cgcm,
    to_config,
)
from cgbound.errors import InputDataError


def test_pdf_peaks():
    assert Cauchy(0, 1).pdf(0.0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert Gaussian(0, 1).pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-15)
    mix = GaussianMixture.of((0.9, 0.0, 1.0), (0.1, 0.0, 10.0))
    expected = 0.9 * Gaussian(0, 1).pdf(0.0) + 0.1 * Gaussian(0, 10).pdf(0.0)
    assert mix.pdf(0.0) == pytest.approx(expected, abs=1e-15)
    assert mix.pdf(0.0) == pytest.approx(0.36304, abs=5e-6)


def test_cdf_values():
    assert Cauchy(0, 1).cdf(1.0) == pytest.approx(0.75, abs=1e-15)
    assert Gaussian(0, 1).cdf(0.0) == 0.5
    half = CgcmHalf("right", loc=0.04, lam=0.79)
    assert half.cdf(0.04) == pytest.approx(0.5, abs=1e-15)


def test_quantiles():
    assert Cauchy(0, 1).quantile(0.75) == pytest.approx(1.0, abs=1e-12)
    assert Gaussian(0, 1).quantile(0.5) == 0.0
    mix = GaussianMixture.of((0.9, 0.0, 1.0), (0.1, 0.0, 10.0))
    x = mix.quantile(0.999)
    assert mix.cdf(x) == pytest.approx(0.999, abs=1e-12)


def test_quantile_domain_errors():
    for p in (0.0, 1.0, -0.1, 1.1):
        with pytest.raises(InputDataError):
            Gaussian(0, 1).quantile(p)


def test_sampling_moments():
    x = Gaussian(0, 1).sample(10**6, seed=7)
    assert abs(x.mean()) < 0.005  # 3/sqrt(n) CLT bound
    mix = GaussianMixture.of((0.9, 0.0, 1.0), (0.1, 0.0, 10.0))
    y = mix.sample(10**6, seed=7)
    # component-assignment frequency via the wide component's mass beyond 4 sigma
    frac_far = np.mean(np.abs(y) > 4.0)
    expected = 0.9 * 2 * Gaussian(0, 1).cdf(-4.0) + 0.1 * 2 * Gaussian(0, 10).cdf(-4.0)
    assert abs(frac_far - expected) < 0.002


def test_sampling_deterministic():
    for dist in (Gaussian(1, 2), Cauchy(0, 1), CgcmHalf("left", -0.5, 0.7),
                 GaussianMixture.of((0.5, 0.0, 1.0), (0.5, 2.0, 3.0))):
        a = dist.sample(1, seed=42)
        b = dist.sample(1, seed=42)
        assert a[0] == b[0]


@pytest.mark.parametrize(
    "dist",
    [
        Gaussian(0.3, 1.7),
        Cauchy(-0.2, 0.9),
        GaussianMixture.of((0.9, 0.0, 1.0), (0.1, 0.0, 10.0)),
        CgcmHalf("right", 0.04, 0.79),
        CgcmHalf("left", -0.04, 0.79),
    ],
)
def test_pdf_integrates_to_one(dist):
    lo = dist.quantile(1e-9)
    hi = dist.quantile(1 - 1e-9)
    total, _ = quad(dist.pdf, lo, hi, limit=200)
    assert 1 - 1e-6 <= total <= 1.0 + 1e-9


@pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0, 8.72])
def test_cauchy_over_gaussian_boundary_law(sigma):
    # forward: at the critical ratio the Cauchy bounds the Gaussian on both halves
    lam = MIN_CAUCHY_OVER_GAUSS_RATIO * sigma
    xs = np.linspace(-12 * sigma, 12 * sigma, 100_001)
    fc = Cauchy(0, lam).cdf(xs)
    fg = Gaussian(0, sigma).cdf(xs)
    neg, pos = xs <= 0, xs > 0
    assert np.all(fc[neg] - fg[neg] >= -1e-12)
    assert np.all(fg[pos] - fc[pos] >= -1e-12)
    # necessity: 1% below the ratio the bound fails somewhere
    fc2 = Cauchy(0, 0.99 * lam).cdf(xs)
    ok = np.all(fc2[neg] - fg[neg] >= -1e-12) and np.all(fg[pos] - fc2[pos] >= -1e-12)
    assert not ok


@pytest.mark.parametrize("ratio", [1.0, 1.2, 2.0])
def test_pdf_single_crossing_below_median(ratio):
    sigma = 1.3
    lam = ratio * MIN_CAUCHY_OVER_GAUSS_RATIO * sigma
    xs = np.linspace(-15 * sigma, -1e-9, 200_001)
    diff = Gaussian(0, sigma).pdf(xs) - Cauchy(0, lam).pdf(xs)
    signs = np.sign(diff)
    signs = signs[signs != 0]
    changes = np.count_nonzero(np.diff(signs))
    assert changes == 1


def test_cgcm_half_continuity():
    for side, loc in (("right", 0.04), ("left", -0.04)):
        half = CgcmHalf(side, loc, 0.79)
        eps = 1e-8
        assert abs(half.cdf(loc - eps) - half.cdf(loc + eps)) < 1e-6
        assert abs(half.pdf(loc - eps) - half.pdf(loc + eps)) < 1e-6


def test_cgcm_pair_construction():
    left, right = paired_cgcm(0.04, 0.79)
    assert left.side == "left" and left.loc == -0.04
    assert right.side == "right" and right.loc == 0.04
    # junction density matches on both pieces: k*lam Gaussian vs lam Cauchy
    assert right.pdf(0.04) == pytest.approx(1 / (math.pi * 0.79), rel=1e-12)


@given(
    p=st.floats(min_value=1e-6, max_value=1 - 1e-6),
    mu=st.floats(min_value=-5, max_value=5),
    sigma=st.floats(min_value=0.01, max_value=50),
)
@settings(max_examples=200, deadline=None)
def test_gaussian_quantile_roundtrip(p, mu, sigma):
    d = Gaussian(mu, sigma)
    assert d.cdf(d.quantile(p)) == pytest.approx(p, abs=1e-12)


@given(
    p=st.floats(min_value=1e-6, max_value=1 - 1e-6),
    lam=st.floats(min_value=0.01, max_value=50),
)
@settings(max_examples=200, deadline=None)
def test_cgcm_quantile_roundtrip(p, lam):
    d = CgcmHalf("right", 0.3, lam)
    assert d.cdf(d.quantile(p)) == pytest.approx(p, abs=1e-12)


def test_combinators():
    g = Gaussian(0, 1)
    s = ScaledCdf(g, 2.0)
    assert s.cdf(2.0) == pytest.approx(g.cdf(1.0), abs=1e-15)
    assert s.quantile(0.9) == pytest.approx(2 * g.quantile(0.9), abs=1e-12)
    m = MirroredCdf(Gaussian(1, 1))
    assert m.cdf(-1.0) == pytest.approx(0.5, abs=1e-15)
    lo = MinCdf(Gaussian(0, 1), Gaussian(0.5, 1))
    hi = MaxCdf(Gaussian(0, 1), Gaussian(0.5, 1))
    xs = np.linspace(-4, 4, 101)
    assert np.all(np.asarray(lo.cdf(xs)) <= np.asarray(hi.cdf(xs)))
    # inverse conventions: min of cdfs inverts to max of quantiles
    assert lo.quantile(0.7) == pytest.approx(max(Gaussian(0, 1).quantile(0.7),
                                                 Gaussian(0.5, 1).quantile(0.7)))


def test_serialization_roundtrip():
    dists = [
        Gaussian(0.1, 2.3),
        Cauchy(-0.5, 0.83),
        GaussianMixture.of((0.9, 0.0, 1.0), (0.1, 1.0, 10.0)),
        CgcmHalf("left", -0.04, 0.79),
    ]
    for d in dists:
        cfg = to_config(d)
        back = from_config(cfg)
        assert back == d


def test_invalid_parameters_rejected():
    with pytest.raises(InputDataError):
        Gaussian(0, -1)
    with pytest.raises(InputDataError):
        Cauchy(0, 0.0)
    with pytest.raises(InputDataError):
        GaussianMixture.of((0.5, 0.0, 1.0), (0.6, 0.0, 2.0))  # weights sum > 1
    with pytest.raises(InputDataError):
        CgcmHalf("up", 0.0, 1.0)
