"""Constructing Particles from distributions.

Systematic sampling places one sample at each midpoint quantile
``(i - 0.5) / N`` and then randomly permutes the result.  The sorted
samples therefore match the target distribution exactly (zero-discrepancy
marginals) while the permutation decorrelates independently constructed
values at the index level.  Randomness comes from numpy's PCG64
generator, so a fixed seed reproduces samples bit for bit.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .particles import Particles, StaticParticles

__all__ = [
    "MvNormalSpec",
    "Normal",
    "QuantileFn",
    "SigmaPointSet",
    "Uniform",
    "from_distribution",
    "mp",
    "mv_normal_particles",
    "norm_ppf",
    "pm",
    "random_samples",
    "sigma_points",
    "sigma_points_1d",
    "systematic_samples",
]


def as_generator(rng):
    """Coerce None / integer seed / Generator into a numpy Generator (PCG64)."""
    if rng is None:
        return np.random.default_rng()
    if isinstance(rng, (int, np.integer)):
        return np.random.default_rng(int(rng))
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"rng must be None, an integer seed or a numpy Generator, got {type(rng).__name__}")


# -- inverse normal CDF --------------------------------------------------------
# Wichura's rational approximation (algorithm PPND16), accurate to full
# double precision; far better than the 1e-9 relative error this library
# promises for the normal quantile.

_PPND_A = (3.3871328727963666080, 1.3314166789178437745e2, 1.9715909503065514427e3,
           1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
           3.3430575583588128105e4, 2.5090809287301226727e3)
_PPND_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
           2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
           5.2264952788528545610e3)
_PPND_C = (1.42343711074968357734, 4.63033784615654529590, 5.76949722146069140550,
           3.64784832476320460504, 1.27045825245236838258, 2.41780725177450611770e-1,
           2.27238449892691845833e-2, 7.74545014278341407640e-4)
_PPND_D = (1.0, 2.05319162663775882187, 1.67638483018380384940, 6.89767334985100004550e-1,
           1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
           1.05075007164441684324e-9)
_PPND_E = (6.65790464350110377720, 5.46378491116411436990, 1.78482653991729133580,
           2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
           2.71155556874348757815e-5, 2.01033439929228813265e-7)
_PPND_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
           7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
           2.04426310338993978564e-15)


def _poly(coeffs, r):
    acc = np.full_like(r, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * r + c
    return acc


def norm_ppf(u):
    """Standard normal quantile (inverse CDF); -inf/+inf at 0/1, NaN outside."""
    arr = np.asarray(u, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.full(arr.shape, np.nan)

    with np.errstate(divide="ignore", invalid="ignore"):
        q = arr - 0.5
        central = np.abs(q) <= 0.425
        if np.any(central):
            r = 0.180625 - q[central] * q[central]
            out[central] = q[central] * _poly(_PPND_A, r) / _poly(_PPND_B, r)

        tail = ~central & (arr > 0.0) & (arr < 1.0)
        if np.any(tail):
            q_t = q[tail]
            r = np.where(q_t < 0.0, arr[tail], 1.0 - arr[tail])
            r = np.sqrt(-np.log(r))
            near = r <= 5.0
            val = np.empty_like(r)
            if np.any(near):
                rn = r[near] - 1.6
                val[near] = _poly(_PPND_C, rn) / _poly(_PPND_D, rn)
            if np.any(~near):
                rf = r[~near] - 5.0
                val[~near] = _poly(_PPND_E, rf) / _poly(_PPND_F, rf)
            out[tail] = np.where(q_t < 0.0, -val, val)

        out[arr == 0.0] = -np.inf
        out[arr == 1.0] = np.inf

    return float(out[0]) if scalar else out


# -- scalar distributions ------------------------------------------------------

class Normal:
    """Normal distribution with mean ``mu`` and standard deviation ``sigma >= 0``."""

    def __init__(self, mu, sigma):
        if sigma < 0.0:
            raise ValueError(f"sigma must be nonnegative, got {sigma}")
        self.mu = float(mu)
        self.sigma = float(sigma)

    @property
    def mean(self):
        return self.mu

    @property
    def std(self):
        return self.sigma

    def quantile(self, u):
        if self.sigma == 0.0:
            u_arr = np.asarray(u, dtype=np.float64)
            return self.mu if u_arr.ndim == 0 else np.full(u_arr.shape, self.mu)
        return self.mu + self.sigma * norm_ppf(u)

    def __repr__(self):
        return f"Normal({self.mu}, {self.sigma})"


class Uniform:
    """Uniform distribution on ``[lo, hi)`` with ``hi > lo``."""

    def __init__(self, lo, hi):
        if not hi > lo:
            raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
        self.lo = float(lo)
        self.hi = float(hi)

    @property
    def mean(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def std(self):
        return (self.hi - self.lo) / math.sqrt(12.0)

    def quantile(self, u):
        return self.lo + np.asarray(u, dtype=np.float64) * (self.hi - self.lo)

    def __repr__(self):
        return f"Uniform({self.lo}, {self.hi})"


class QuantileFn:
    """Distribution defined by a user quantile function on (0, 1).

    ``fn`` must be monotone nondecreasing; step functions model discrete
    distributions (systematic sampling then hits each atom with the right
    mass).  ``mean``/``std`` are optional metadata.
    """

    def __init__(self, fn, mean=None, std=None):
        self.fn = fn
        self.mean = mean
        self.std = std

    def quantile(self, u):
        u_arr = np.asarray(u, dtype=np.float64)
        if u_arr.ndim == 0:
            return float(self.fn(float(u_arr)))
        return np.fromiter((float(self.fn(float(x))) for x in u_arr),
                           dtype=np.float64, count=u_arr.shape[0])

    def __repr__(self):
        return f"QuantileFn({getattr(self.fn, '__name__', 'fn')})"


# -- univariate constructors ---------------------------------------------------

def _check_finite(values, u):
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise ValueError(
            f"quantile function returned {values[bad]!r} at u={u[bad]!r}; "
            "systematic sampling needs finite quantiles on (0, 1)")


def systematic_samples(dist, n, rng=None, cls=Particles):
    """Particles from ``dist`` at the midpoint quantile grid, randomly permuted.

    The sorted samples are exactly ``dist.quantile((i - 0.5) / n)`` for
    i = 1..n; the permutation makes independently constructed values
    approximately index-independent.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    u = (np.arange(1, n + 1, dtype=np.float64) - 0.5) / n
    values = np.asarray(dist.quantile(u), dtype=np.float64)
    _check_finite(values, u)
    return cls._wrap(as_generator(rng).permutation(values))


def random_samples(dist, n, rng=None, cls=Particles):
    """Particles from ``n`` i.i.d. draws (inverse-CDF of uniform variates).

    The plain Monte-Carlo baseline; mean estimates carry more variance
    than with :func:`systematic_samples`.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    u = as_generator(rng).random(n)
    values = np.asarray(dist.quantile(u), dtype=np.float64)
    _check_finite(values, u)
    return cls._wrap(np.ascontiguousarray(values))


def pm(mu, sigma=0.0, n=Particles.DEFAULT_N, rng=None):
    """Gaussian uncertain value ``mu`` +/- ``sigma`` (systematic sampling)."""
    return systematic_samples(Normal(mu, sigma), n, rng)


def mp(mu, sigma=0.0, n=StaticParticles.DEFAULT_N, rng=None):
    """Small-count flavor of :func:`pm` returning :class:`StaticParticles`."""
    return systematic_samples(Normal(mu, sigma), n, rng, cls=StaticParticles)


def from_distribution(dist, n, rng=None):
    """Particles distributed per ``dist`` (systematic sampling).

    Works for continuous quantiles and for step quantile functions, where
    each atom receives sample mass proportional to its probability.
    """
    return systematic_samples(dist, n, rng)


# -- multivariate --------------------------------------------------------------

@dataclass
class MvNormalSpec:
    """Mean vector and positive-semidefinite covariance for correlated particles."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=np.float64))
        self.cov = np.atleast_2d(np.asarray(self.cov, dtype=np.float64))
        k = self.mean.shape[0]
        if self.mean.ndim != 1 or self.cov.shape != (k, k):
            raise ValueError(f"need a length-k mean and k x k covariance, got "
                             f"{self.mean.shape} and {self.cov.shape}")
        scale = max(1.0, float(np.abs(self.cov).max()))
        if float(np.abs(self.cov - self.cov.T).max()) > 1e-12 * scale:
            raise ValueError("covariance must be symmetric (tolerance 1e-12)")
        if float(np.linalg.eigvalsh(self.cov).min()) < -1e-10 * scale:
            raise ValueError("covariance must be positive semidefinite "
                             "(eigenvalue tolerance -1e-10)")

    @property
    def k(self):
        return self.mean.shape[0]


def _psd_cholesky(cov):
    """Lower Cholesky factor, tolerating numerically semidefinite input.

    Failed factorizations are retried at most 3 times with a diagonal
    jitter of 1e-12 * trace / k per attempt.
    """
    if not cov.any():
        return np.zeros_like(cov)
    k = cov.shape[0]
    jitter = 1e-12 * float(np.trace(cov)) / k
    work = np.array(cov, copy=True)
    for attempt in range(4):
        try:
            return np.linalg.cholesky(work)
        except np.linalg.LinAlgError:
            if attempt == 3:
                raise ValueError("covariance is not positive semidefinite within "
                                 "jitter tolerance; Cholesky failed after 3 retries")
            work[np.diag_indices(k)] += jitter


def mv_normal_particles(spec, n, rng=None):
    """k correlated Particles with the requested mean and covariance.

    Draws k independent systematic standard-normal Particles (each with
    its own random permutation) and maps them through the lower Cholesky
    factor of the covariance.
    """
    if not isinstance(spec, MvNormalSpec):
        spec = MvNormalSpec(*spec)
    gen = as_generator(rng)
    L = _psd_cholesky(spec.cov)
    z = np.vstack([systematic_samples(_STD_NORMAL, n, gen).samples for _ in range(spec.k)])
    x = spec.mean[:, None] + L @ z
    return [Particles._wrap(np.ascontiguousarray(row)) for row in x]


_STD_NORMAL = Normal(0.0, 1.0)


@dataclass
class SigmaPointSet:
    """2k+1 equal-weight points matching a mean and covariance exactly.

    Because the points are unweighted, moment matching uses the population
    convention (divisor N = 2k+1); :meth:`population_mean` and
    :meth:`population_cov` reproduce the targets to ~1e-10.
    """

    points: list = field(repr=False)  # k Particles, each with 2k+1 samples
    mean: np.ndarray = None
    cov: np.ndarray = None

    def population_mean(self):
        return np.array([float(np.mean(p.samples)) for p in self.points])

    def population_cov(self):
        matrix = np.vstack([p.samples for p in self.points])
        return np.atleast_2d(np.cov(matrix, ddof=0))


def sigma_points(mean, cov):
    """Equal-weight sigma-point set for the given mean and PSD covariance.

    The 2k+1 points are the mean plus/minus scaled Cholesky columns with
    scale ``sqrt((2k+1)/2)``, chosen so the unweighted population mean and
    covariance of the set equal the targets exactly.
    """
    spec = MvNormalSpec(mean, cov)
    k = spec.k
    L = _psd_cholesky(spec.cov)
    c = math.sqrt((2 * k + 1) / 2.0)
    pts = np.empty((k, 2 * k + 1))
    pts[:, 0] = spec.mean
    for j in range(k):
        offset = c * L[:, j]
        pts[:, 1 + j] = spec.mean + offset
        pts[:, 1 + k + j] = spec.mean - offset
    points = [Particles._wrap(np.ascontiguousarray(row)) for row in pts]
    return SigmaPointSet(points=points, mean=spec.mean, cov=spec.cov)


def sigma_points_1d(mu, sigma):
    """Scalar sigma points: Particles with samples {mu, mu +/- sigma*sqrt(3/2)}."""
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    offset = math.sqrt(1.5) * sigma
    return Particles([mu, mu + offset, mu - offset])
