import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from cobaycpd.polyagamma import pg_log_tilt, pg_mean, pg_sample

from oracles import pg_truncated_sum


def test_pg_mean_examples():
    assert pg_mean(0.0) == 0.25
    assert pg_mean(2.0) == pytest.approx(np.tanh(1.0) / 4, rel=1e-15)
    assert pg_mean(2.0) == pytest.approx(0.190399, abs=1e-6)
    assert pg_mean(-2.0) == pg_mean(2.0)


@given(st.floats(-50, 50))
def test_pg_mean_even_and_bounded(c):
    m = pg_mean(c)
    assert m == pg_mean(-c)
    assert 0 < m <= 0.25


def test_pg_mean_continuous_near_zero():
    assert pg_mean(1e-5) == pytest.approx(np.tanh(0.5e-5) / 2e-5, rel=1e-12)
    assert pg_mean(9.9e-5) == pytest.approx(pg_mean(1.01e-4), rel=1e-8)


def test_pg_mean_matches_numerical_integral():
    # E[omega] = -d/dc log cosh(c/2)^-1 ... checked here against the density-free
    # Laplace identity E[exp(-omega t)] = cosh(c/2) / cosh(sqrt(c^2/4 + t/2))
    c = 1.5
    h = 1e-5
    lap = lambda t: np.cosh(c / 2) / np.cosh(np.sqrt(c * c / 4 + t / 2))
    assert pg_mean(c) == pytest.approx((lap(0) - lap(h)) / h, rel=1e-4)


def test_pg_log_tilt_examples():
    assert pg_log_tilt(1.0, 0.0) == pytest.approx(-np.log(2))
    assert pg_log_tilt(0.5, 2.0) == pytest.approx(-np.log(2))


@pytest.mark.parametrize("c", [0.0, 2.0])
def test_pg_sample_mean_examples(c):
    draws = pg_sample(np.full(100_000, c), np.random.default_rng(1))
    tol = 0.005 if c == 0 else 0.004
    assert draws.mean() == pytest.approx(pg_mean(c), abs=tol)


def test_pg_sample_agrees_with_gamma_sum_oracle():
    rng = np.random.default_rng(3)
    c = 1.7
    ours = pg_sample(np.full(40_000, c), rng)
    ref = pg_truncated_sum(c, 40_000, rng)
    # tail of the truncated series is about 1 / (2 pi^2 * 200), negligible here
    assert ours.mean() == pytest.approx(ref.mean(), abs=4 * ref.std() / np.sqrt(20_000))
    assert ours.var() == pytest.approx(ref.var(), rel=0.05)
    qs = [0.1, 0.5, 0.9]
    assert np.quantile(ours, qs) == pytest.approx(np.quantile(ref, qs), rel=0.03)


def test_pg_variance_formula():
    c = 3.0
    var = (np.sinh(c) - c) / (4 * c ** 3 * np.cosh(c / 2) ** 2)
    draws = pg_sample(np.full(100_000, c), np.random.default_rng(5))
    assert draws.var() == pytest.approx(var, rel=0.03)


@given(st.floats(-30, 30), st.integers(0, 2**32 - 1))
def test_pg_sample_positive_and_seeded(c, seed):
    a = pg_sample(np.full(5, c), np.random.default_rng(seed))
    b = pg_sample(np.full(5, c), np.random.default_rng(seed))
    assert np.all(a > 0)
    assert np.array_equal(a, b)


def test_pg_sample_shapes_and_errors():
    assert isinstance(pg_sample(1.0, 0), float)
    assert pg_sample(np.ones((2, 3)), 0).shape == (2, 3)
    assert pg_sample(np.empty(0), 0).shape == (0,)
    with pytest.raises(ValueError):
        pg_sample(np.nan)
    with pytest.raises(ValueError):
        pg_sample([1.0, np.inf])


def test_large_tilt_is_stable():
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        draws = pg_sample(np.full(1000, 200.0), np.random.default_rng(0))
    assert draws.mean() == pytest.approx(pg_mean(200.0), rel=0.05)


def test_sigmoid_mixture_identity():
    # sigma(z) = 1/2 exp(z/2) E[exp(-z^2 omega / 2)], omega ~ PG(1, 0)
    draws = pg_sample(np.zeros(100_000), np.random.default_rng(11))
    for z in (-2.0, 0.5, 3.0):
        est = 0.5 * np.exp(z / 2) * np.exp(-z * z * draws / 2)
        se = est.std() / np.sqrt(est.size)
        assert abs(est.mean() - 1 / (1 + np.exp(-z))) < 3 * se
