"""Sampling constructors: inverse normal CDF accuracy, systematic marginals,
randomness contracts, correlated multivariate construction and sigma points."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcparticles import (MvNormalSpec, Normal, Particles, QuantileFn, Uniform,
                         cov, from_distribution, mp, mv_normal_particles,
                         norm_ppf, pm, random_samples, sigma_points,
                         sigma_points_1d, systematic_samples)
from mcparticles.sampling import _psd_cholesky
from conftest import bitwise_equal

SQRT_3_2 = 1.2247448713915890491


def _ppf_oracle(u):
    # independent high-precision route: solve ncdf(z) = u at the exact
    # binary value of u (Newton polish of a rough starting point)
    with mpmath.workdps(400):
        target = mpmath.mpf(u)
        z = mpmath.findroot(lambda z: mpmath.ncdf(z) - target,
                            mpmath.mpf(float(norm_ppf(u))))
        return float(z)


# -- inverse normal CDF ----------------------------------------------------------

@pytest.mark.parametrize("u", [1e-300, 1e-30, 1e-12, 1e-9, 1e-6, 1e-3, 0.01, 0.1,
                               0.3, 0.42, 0.425, 0.43, 0.5, 0.57, 0.7, 0.9,
                               0.99, 1 - 1e-6, 1 - 1e-9, 1 - 1e-12])
def test_norm_ppf_against_erfinv_oracle(u):
    expected = _ppf_oracle(u)
    got = norm_ppf(u)
    if expected == 0.0:
        assert got == 0.0
    else:
        assert abs(got / expected - 1.0) < 1e-9  # promised bound; actual ~1e-15


def test_norm_ppf_vectorized_matches_scalar():
    u = np.linspace(1e-6, 1 - 1e-6, 1001)
    vec = norm_ppf(u)
    assert bitwise_equal(vec, [norm_ppf(float(x)) for x in u])


def test_norm_ppf_edges():
    assert norm_ppf(0.0) == -math.inf
    assert norm_ppf(1.0) == math.inf
    assert math.isnan(norm_ppf(-0.1))
    assert math.isnan(norm_ppf(1.1))
    assert norm_ppf(0.5) == 0.0


@given(st.floats(min_value=1e-15, max_value=1.0 - 1e-15))
@settings(max_examples=200)
def test_norm_ppf_accuracy_fuzz(u):
    expected = _ppf_oracle(u)
    if expected != 0.0:
        assert abs(norm_ppf(u) / expected - 1.0) < 1e-9


# -- systematic sampling ---------------------------------------------------------

def test_systematic_sorted_equals_quantile_grid():
    n = 137
    d = Normal(2.0, 3.0)
    p = systematic_samples(d, n, rng=0)
    u = (np.arange(1, n + 1) - 0.5) / n
    assert bitwise_equal(np.sort(p.samples), np.sort(d.quantile(u)))


def test_systematic_normal_two_samples():
    p = systematic_samples(Normal(0.0, 1.0), 2, rng=1)
    assert sorted(p.samples) == pytest.approx([-0.6744897501960817, 0.6744897501960817],
                                              rel=1e-9)


def test_systematic_uniform_four_samples():
    p = systematic_samples(Uniform(0.0, 1.0), 4, rng=2)
    assert sorted(p.samples.tolist()) == [0.125, 0.375, 0.625, 0.875]


def test_pm_std_matches_reference():
    assert abs(pm(math.pi, 0.1, n=500, rng=3).std() - 0.09997062445203879) < 5e-4 * 0.1


def test_pm_zero_sigma():
    p = pm(5.0, 0.0, n=20, rng=4)
    assert p.samples.tolist() == [5.0] * 20


def test_pm_mean_exact():
    assert abs(pm(2.0, 0.1, n=100, rng=5).mean() - 2.0) < 1e-12


def test_pm_rendering():
    assert repr(pm(math.pi, 0.1, rng=6)) == "P500(3.142 ± 0.1)"


def test_mp_flavor():
    p = mp(2.0, 0.1, rng=7)
    assert p.n == 100
    assert repr(p).startswith("SP100(")


def test_determinism_same_seed_bitwise():
    for build in (lambda r: pm(1.0, 2.0, n=64, rng=r),
                  lambda r: systematic_samples(Uniform(-1.0, 4.0), 64, rng=r),
                  lambda r: random_samples(Normal(0.0, 1.0), 64, rng=r)):
        assert bitwise_equal(build(42).samples, build(42).samples)


def test_quantile_fn_two_point():
    d = QuantileFn(lambda u: 0.0 if u < 0.5 else 1.0)
    p = from_distribution(d, 4, rng=8)
    assert sorted(p.samples.tolist()) == [0.0, 0.0, 1.0, 1.0]


def test_uniform_systematic_interior():
    p = from_distribution(Uniform(2.0, 4.0), 100, rng=9)
    assert abs(p.mean() - 3.0) < 1e-12
    assert p.min() >= 2.01 - 1e-12
    assert p.max() <= 3.99 + 1e-12


def test_poisson_like_quantile_fn():
    def poisson_q(rate):
        def q(u):
            k, pmf = 0, math.exp(-rate)
            cdf = pmf
            while cdf < u and k < 1000:
                k += 1
                pmf *= rate / k
                cdf += pmf
            return float(k)
        return q

    p = from_distribution(QuantileFn(poisson_q(3.0)), 500, rng=10)
    assert abs(p.mean() / 3.0 - 1.0) < 0.05
    assert abs(p.std() / math.sqrt(3.0) - 1.0) < 0.10


def test_nonfinite_quantile_reported():
    d = QuantileFn(lambda u: math.inf if u > 0.9 else u)
    with pytest.raises(ValueError, match="u="):
        systematic_samples(d, 20, rng=11)


def test_random_samples_clt_bounds():
    p = random_samples(Normal(0.0, 1.0), 10_000, rng=12)
    assert abs(p.mean()) < 0.05
    assert abs(p.std() - 1.0) < 0.05


def test_variance_reduction_over_repetitions():
    sys_means = [systematic_samples(Normal(0.0, 1.0), 100, rng=r).mean()
                 for r in range(200)]
    rand_means = [random_samples(Normal(0.0, 1.0), 100, rng=10_000 + r).mean()
                  for r in range(200)]
    assert np.var(sys_means) < np.var(rand_means)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        Normal(0.0, -1.0)
    with pytest.raises(ValueError):
        Uniform(1.0, 1.0)
    with pytest.raises(ValueError):
        pm(0.0, 1.0, n=0)
    with pytest.raises(TypeError):
        pm(0.0, 1.0, rng="seed")


# -- multivariate ----------------------------------------------------------------

def test_mv_spec_validation():
    with pytest.raises(ValueError):
        MvNormalSpec([0.0, 0.0], [[1.0, 0.5], [0.2, 1.0]])  # asymmetric
    with pytest.raises(ValueError):
        MvNormalSpec([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])  # indefinite
    with pytest.raises(ValueError):
        MvNormalSpec([0.0], [[1.0, 0.0], [0.0, 1.0]])  # shape mismatch


def test_mv_single_dimension_matches_pm():
    ps = mv_normal_particles(MvNormalSpec([2.0], [[0.25]]), 400, rng=13)
    ref = pm(2.0, 0.5, n=400, rng=14)
    assert abs(ps[0].mean() - ref.mean()) < 1e-10
    assert abs(ps[0].std() - ref.std()) < 1e-10


def test_mv_identity_cov_nearly_independent():
    ps = mv_normal_particles(MvNormalSpec([0.0, 0.0], np.eye(2)), 500, rng=15)
    assert abs(cov(ps)[0, 1]) < 0.1


def test_mv_requested_correlation():
    spec = MvNormalSpec([0.0, 0.0], [[1.0, 0.9], [0.9, 1.0]])
    ps = mv_normal_particles(spec, 500, rng=16)
    matrix = cov(ps)
    corr = matrix[0, 1] / math.sqrt(matrix[0, 0] * matrix[1, 1])
    assert abs(corr - 0.9) < 0.05


def test_mv_mean_exact():
    spec = MvNormalSpec([3.0, -2.0], [[2.0, 0.3], [0.3, 1.0]])
    ps = mv_normal_particles(spec, 256, rng=17)
    assert abs(ps[0].mean() - 3.0) < 1e-10
    assert abs(ps[1].mean() + 2.0) < 1e-10


def test_psd_cholesky_jitter_for_singular():
    low_rank = np.array([[1.0, 1.0], [1.0, 1.0]])
    factor = _psd_cholesky(low_rank)
    assert np.allclose(factor @ factor.T, low_rank, atol=1e-10)


def test_psd_cholesky_zero_matrix():
    assert np.array_equal(_psd_cholesky(np.zeros((3, 3))), np.zeros((3, 3)))


# -- sigma points ----------------------------------------------------------------

def test_sigma_points_1d_values():
    p = sigma_points_1d(0.0, 1.0)
    assert sorted(p.samples.tolist()) == pytest.approx([-SQRT_3_2, 0.0, SQRT_3_2],
                                                       abs=1e-15)
    # equal-weight moment equations by hand: (0 + 3/2 + 3/2)/3 = 1
    assert np.mean(p.samples) == 0.0
    assert np.var(p.samples) == pytest.approx(1.0, abs=1e-15)


def test_sigma_points_1d_zero_sigma():
    assert sigma_points_1d(5.0, 0.0).samples.tolist() == [5.0, 5.0, 5.0]


def test_sigma_points_1d_population_std():
    p = sigma_points_1d(2.0, 0.7)
    assert math.sqrt(np.var(p.samples)) == pytest.approx(0.7, abs=1e-12)


def test_sigma_points_count():
    sp = sigma_points([1.0, 2.0, 3.0], np.eye(3))
    assert len(sp.points) == 3
    assert all(p.n == 7 for p in sp.points)


def _random_psd(k, seed):
    rng = np.random.default_rng(seed)
    base = rng.standard_normal((k, k))
    return base @ base.T + 0.1 * np.eye(k)


@pytest.mark.parametrize("k", range(1, 11))
def test_sigma_points_reproduce_moments(k):
    mean = np.linspace(-1.0, 2.0, k)
    target = _random_psd(k, 100 + k)
    sp = sigma_points(mean, target)
    assert np.abs(sp.population_mean() - mean).max() < 1e-10
    assert np.abs(sp.population_cov() - target).max() < 1e-10


@pytest.mark.parametrize("k", [1, 2, 4])
def test_sigma_points_affine_closure(k):
    rng = np.random.default_rng(200 + k)
    mean = rng.normal(size=k)
    target = _random_psd(k, 300 + k)
    sp = sigma_points(mean, target)
    a_mat = rng.normal(size=(k, k))
    b_vec = rng.normal(size=k)
    # push each point through y = A x + b using the overloaded arithmetic
    y = [sum((float(a_mat[i, j]) * sp.points[j] for j in range(k)),
             start=Particles([float(b_vec[i])] * (2 * k + 1)))
         for i in range(k)]
    y_mean = np.array([float(np.mean(p.samples)) for p in y])
    y_cov = np.cov(np.vstack([p.samples for p in y]), ddof=0)
    assert np.abs(y_mean - (a_mat @ mean + b_vec)).max() < 1e-10
    assert np.abs(np.atleast_2d(y_cov) - a_mat @ target @ a_mat.T).max() < 1e-10


def test_sigma_points_rejects_indefinite():
    with pytest.raises(ValueError):
        sigma_points([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
