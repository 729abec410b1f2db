import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgbound.distributions import Gaussian, GaussianMixture
from cgbound.empirical import EmpiricalCdf, FitTarget, build_ecdf, load_samples
from cgbound.errors import InputDataError


def test_step_evaluation():
    e = build_ecdf([-1.0, 0.0, 1.0])
    assert e.cdf(0.5) == pytest.approx(2 / 3)
    assert e.bias == 0.0
    assert e.bounds_at(0.0) == (pytest.approx(1 / 3), pytest.approx(2 / 3))
    assert e.bounds_at(-5.0) == (0.0, 0.0)
    assert e.bounds_at(5.0) == (1.0, 1.0)


def test_build_rejects_bad_input():
    with pytest.raises(InputDataError):
        build_ecdf([1.0])
    with pytest.raises(InputDataError):
        build_ecdf([1.0, float("nan")])


def test_kurtosis_against_analytic_mixture():
    mix = GaussianMixture.of((0.9, 0.0, 1.0), (0.1, 0.0, 10.0))
    # analytic central moments: m2 = sum w_i s_i^2, m4 = 3 sum w_i s_i^4
    m2 = 0.9 * 1 + 0.1 * 100
    m4 = 3 * (0.9 * 1 + 0.1 * 10**4)
    kurt_true = m4 / m2**2
    e = build_ecdf(mix.sample(10**5, seed=3))
    assert e.kurtosis > 10  # far beyond the Gaussian value of 3
    assert e.kurtosis == pytest.approx(kurt_true, rel=0.15)
    assert e.excess_kurtosis == pytest.approx(e.kurtosis - 3.0)


def test_dkw_convergence():
    g = Gaussian(0, 1)
    e = build_ecdf(g.sample(10**5, seed=99))
    xs = np.linspace(-5, 5, 20001)
    sup = np.max(np.abs(e.cdf(xs) - g.cdf(xs)))
    assert sup < 0.01


def test_monotone_and_bounded():
    e = build_ecdf(Gaussian(0, 1).sample(1000, seed=5))
    xs = np.linspace(-6, 6, 5001)
    v = e.cdf(xs)
    assert np.all(np.diff(v) >= 0)
    assert v.min() >= 0.0 and v.max() <= 1.0


@given(st.lists(st.integers(min_value=-5, max_value=5), min_size=2, max_size=60))
@settings(max_examples=200, deadline=None)
def test_corner_gap_equals_multiplicity(values):
    arr = np.array(values, dtype=float)
    e = build_ecdf(arr)
    for x in np.unique(arr):
        lo, hi = e.bounds_at(x)
        assert hi - lo == pytest.approx(np.sum(arr == x) / arr.size)


def test_load_samples(tmp_path):
    p = tmp_path / "errs.csv"
    p.write_text("error_m\n0.5\n-1.25\n3.0\n")
    vals = load_samples(p)
    assert vals.tolist() == [0.5, -1.25, 3.0]


def test_load_samples_crlf(tmp_path):
    lf = tmp_path / "lf.csv"
    crlf = tmp_path / "crlf.csv"
    lf.write_bytes(b"error_m\n1.5\n2.5\n")
    crlf.write_bytes(b"error_m\r\n1.5\r\n2.5\r\n")
    assert load_samples(lf).tolist() == load_samples(crlf).tolist()


def test_load_samples_errors(tmp_path):
    missing = tmp_path / "missing.csv"
    missing.write_text("other\n1.0\n")
    with pytest.raises(InputDataError, match="error_m"):
        load_samples(missing)

    bad = tmp_path / "bad.csv"
    bad.write_text("error_m\n1.0\nNaN\n")
    with pytest.raises(InputDataError, match="row 2"):
        load_samples(bad)

    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(InputDataError):
        load_samples(empty)

    norows = tmp_path / "norows.csv"
    norows.write_text("error_m\n")
    with pytest.raises(InputDataError, match="no data rows"):
        load_samples(norows)


def test_fit_target_from_ecdf():
    e = build_ecdf([-1.0, 0.0, 0.0, 1.0])
    t = FitTarget.from_ecdf(e)
    assert t.xs.tolist() == [-1.0, 0.0, 1.0]
    assert t.lo.tolist() == [0.0, 0.25, 0.75]
    assert t.hi.tolist() == [0.25, 0.75, 1.0]
    assert t.kind == "empirical"
    assert t.n_samples == 4
    # paired conventions drop the unreachable extreme corners
    assert t.paired_left_req().tolist() == [0.25, 0.75, 0.75]
    assert t.paired_right_cap().tolist() == [0.25, 0.25, 0.75]


def test_fit_target_from_distribution():
    g = Gaussian(0.5, 2.0)
    t = FitTarget.from_distribution(g, n_points=101, tail_level=1e-4)
    assert t.kind == "analytic"
    assert t.guard == 0.0
    assert np.allclose(t.lo, t.hi)
    assert t.bias == pytest.approx(0.5)
    assert t.center == pytest.approx(0.5)
    shifted = t.shifted(0.5)
    assert shifted.center == pytest.approx(0.0)
    assert shifted.xs[0] == pytest.approx(t.xs[0] - 0.5)
