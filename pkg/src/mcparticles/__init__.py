"""Monte-Carlo uncertain numbers: sample-vector values that propagate
through ordinary numeric code via operator overloading, plus systematic /
sigma-point sampling, a first-order propagation baseline, a generic RK4
integrator and a worst-case optimizer.
"""

__version__ = "0.1.0"

from ._backend import available_backends, backend_name, use_backend
from .linear import LinUncertain, lin_cov, lin_source, lin_stats
from .particles import (ComparisonPolicy, Particles, SampleCountError,
                        StaticParticles, SummaryStats, UncertainComparisonError,
                        compare, cov, kde, lift_nary, lift_unary,
                        set_default_comparison)
from .sampling import (MvNormalSpec, Normal, QuantileFn, SigmaPointSet, Uniform,
                       from_distribution, mp, mv_normal_particles, norm_ppf, pm,
                       random_samples, sigma_points, sigma_points_1d,
                       systematic_samples)
from . import umath  # noqa: F401  (registers numpy ufunc interop)
from . import linear, ode, particles, robust, sampling  # noqa: F401

__all__ = [
    "ComparisonPolicy",
    "LinUncertain",
    "MvNormalSpec",
    "Normal",
    "Particles",
    "QuantileFn",
    "SampleCountError",
    "SigmaPointSet",
    "StaticParticles",
    "SummaryStats",
    "UncertainComparisonError",
    "Uniform",
    "available_backends",
    "backend_name",
    "compare",
    "cov",
    "from_distribution",
    "kde",
    "lift_nary",
    "lift_unary",
    "lin_cov",
    "lin_source",
    "lin_stats",
    "mp",
    "mv_normal_particles",
    "norm_ppf",
    "ode",
    "pm",
    "random_samples",
    "robust",
    "set_default_comparison",
    "sigma_points",
    "sigma_points_1d",
    "systematic_samples",
    "umath",
    "use_backend",
]
