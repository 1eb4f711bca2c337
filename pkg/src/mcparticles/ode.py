"""Fixed-step RK4 integration generic over the number type, plus the
uncertain-pendulum benchmark problem.

The same integrator code path serves plain floats, Particles and
LinUncertain states: arithmetic is dispatched through operator
overloading and :mod:`mcparticles.umath`.  Propagating N samples is a
single integration over batched values, which is what the naive
one-simulation-per-sample engine is benchmarked against.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import umath
from .linear import LinUncertain, lin_source
from .particles import Particles
from .sampling import as_generator, pm, sigma_points

__all__ = [
    "IntegratorConfig",
    "PendulumParams",
    "SimRecord",
    "energy",
    "energy_drift",
    "integrate",
    "pendulum_params",
    "pendulum_rhs",
    "rk4_step",
    "run_engine",
    "simulate_pendulum",
    "trajectory_stats",
]

ENGINES = ("scalar32", "scalar64", "linear", "mc", "sigma", "naive")

# benchmark pendulum: uncertain gravity, length and release angle
G_MEAN, G_SIGMA = 9.79, 0.02
L_MEAN, L_SIGMA = 1.00, 0.01
THETA0_MEAN, THETA0_SIGMA = math.pi / 3.0, 0.02

_Z95 = 1.6448536269514722  # standard normal quantile at 0.95


@dataclass
class IntegratorConfig:
    """Fixed-step integration settings: step ``dt``, horizon ``t_end``,
    and a recording stride."""

    dt: float
    t_end: float
    record_every: int = 1

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < self.dt:
            raise ValueError(f"t_end must be at least one step, got {self.t_end}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")

    @property
    def n_steps(self):
        return int(round(self.t_end / self.dt))


@dataclass
class SimRecord:
    """Recorded trajectory: strictly increasing times and matching states."""

    times: np.ndarray
    states: list  # one tuple of state components per recorded time

    def component(self, idx):
        """All recorded values of one state component."""
        return [u[idx] for u in self.states]


def rk4_step(f, u, t, dt):
    """One classical Runge-Kutta step for state tuple ``u`` at time ``t``."""
    half = 0.5 * dt
    k1 = f(u, t)
    k2 = f(tuple(ui + half * ki for ui, ki in zip(u, k1)), t + half)
    k3 = f(tuple(ui + half * ki for ui, ki in zip(u, k2)), t + half)
    k4 = f(tuple(ui + dt * ki for ui, ki in zip(u, k3)), t + dt)
    sixth = dt / 6.0
    return tuple(ui + sixth * (k1i + 2.0 * (k2i + k3i) + k4i)
                 for ui, k1i, k2i, k3i, k4i in zip(u, k1, k2, k3, k4))


def _component_finite(x):
    if isinstance(x, Particles):
        return bool(np.all(np.isfinite(x.samples)))
    if isinstance(x, LinUncertain):
        return math.isfinite(x.value) and all(math.isfinite(d) for d in x.sens.values())
    return bool(np.isfinite(x))


def integrate(f, u0, cfg):
    """Integrate ``du/dt = f(u, t)`` from ``t = 0`` with fixed-step RK4.

    Records the initial state, every ``record_every``-th step and the
    final step.  A non-finite component at a record point raises
    FloatingPointError naming the time.
    """
    dt = cfg.dt
    steps = cfg.n_steps
    u = tuple(u0)
    times = [0.0]
    states = [u]
    for i in range(1, steps + 1):
        u = rk4_step(f, u, (i - 1) * dt, dt)
        if i % cfg.record_every == 0 or i == steps:
            t = i * dt
            if not all(_component_finite(x) for x in u):
                raise FloatingPointError(f"non-finite state at t={t}")
            times.append(t)
            states.append(u)
    return SimRecord(times=np.asarray(times), states=states)


# -- pendulum model -------------------------------------------------------------

@dataclass
class PendulumParams:
    """Pendulum parameters over any supported number type.

    State ordering is ``u = (theta_dot, theta)``: angular velocity first,
    matching an initial condition of (0, release angle).
    """

    g: object
    L: object
    u0: tuple

    def __post_init__(self):
        if not (_central(self.g) > 0.0 and _central(self.L) > 0.0):
            raise ValueError("central values of g and L must be positive")


def _central(x):
    if isinstance(x, Particles):
        return x.mean()
    if isinstance(x, LinUncertain):
        return x.value
    return float(x)


def pendulum_rhs(params):
    """Right-hand side ``(theta_ddot, theta_dot)`` of the pendulum dynamics.

    The ratio ``-(g/L)`` is hoisted out of the closure: it is unaffected
    by the state, so batched propagation pays for it once per simulation
    rather than once per step (or, naively, once per step per sample).
    """
    neg_g_over_l = -(params.g / params.L)

    def rhs(u, t):
        return (neg_g_over_l * umath.sin(u[1]), u[0])

    return rhs


def energy(u, params):
    """Mechanical energy per unit mass: kinetic + gravitational."""
    v = params.L * u[0]
    return 0.5 * (v * v) - params.g * params.L * umath.cos(u[1])


def energy_drift(record, params):
    """Max relative energy drift between first and last recorded states.

    For Particles states the maximum is over samples, so this checks that
    *every* trajectory conserves energy, not just the mean.
    """
    e0 = energy(record.states[0], params)
    e1 = energy(record.states[-1], params)
    if isinstance(e0, Particles):
        return float(np.max(np.abs((e1.samples - e0.samples) / e0.samples)))
    if isinstance(e0, LinUncertain):
        return abs((e1.value - e0.value) / e0.value)
    return abs((float(e1) - float(e0)) / float(e0))


def pendulum_params(mode, n=100, seed=0):
    """Benchmark-pendulum parameters for one propagation engine.

    ``mc`` and ``naive`` construct identical Particles from the same seed,
    so their per-sample trajectories are directly comparable.
    """
    if mode == "scalar64":
        return PendulumParams(G_MEAN, L_MEAN, (0.0, THETA0_MEAN))
    if mode == "scalar32":
        f32 = np.float32
        return PendulumParams(f32(G_MEAN), f32(L_MEAN), (f32(0.0), f32(THETA0_MEAN)))
    if mode == "linear":
        return PendulumParams(lin_source(G_MEAN, G_SIGMA), lin_source(L_MEAN, L_SIGMA),
                              (lin_source(0.0, 0.0), lin_source(THETA0_MEAN, THETA0_SIGMA)))
    if mode in ("mc", "naive"):
        rng = as_generator(seed)
        g = pm(G_MEAN, G_SIGMA, n, rng)
        length = pm(L_MEAN, L_SIGMA, n, rng)
        theta0 = pm(THETA0_MEAN, THETA0_SIGMA, n, rng)
        return PendulumParams(g, length, (pm(0.0, 0.0, n, rng), theta0))
    if mode == "sigma":
        cov = np.diag([G_SIGMA ** 2, L_SIGMA ** 2, THETA0_SIGMA ** 2])
        sp = sigma_points([G_MEAN, L_MEAN, THETA0_MEAN], cov)
        g, length, theta0 = sp.points
        zeros = Particles(np.zeros(theta0.n))
        return PendulumParams(g, length, (zeros, theta0))
    raise ValueError(f"unknown engine {mode!r}; expected one of {ENGINES}")


def _integrate_naive(params, cfg):
    """One scalar simulation per sample; reassembles Particles trajectories."""
    g_s = params.g.samples
    l_s = params.L.samples
    w0_s = params.u0[0].samples
    th0_s = params.u0[1].samples
    per_sample = []
    for i in range(len(g_s)):
        p_i = PendulumParams(float(g_s[i]), float(l_s[i]),
                             (float(w0_s[i]), float(th0_s[i])))
        per_sample.append(integrate(pendulum_rhs(p_i), p_i.u0, cfg))
    times = per_sample[0].times
    states = []
    for r in range(len(times)):
        state = tuple(
            Particles._wrap(np.array([rec.states[r][c] for rec in per_sample]))
            for c in range(2))
        states.append(state)
    return SimRecord(times=times, states=states)


def simulate_pendulum(mode, cfg, n=100, seed=0):
    """Run the benchmark pendulum under the chosen propagation engine."""
    params = pendulum_params(mode, n=n, seed=seed)
    if mode == "naive":
        return _integrate_naive(params, cfg)
    return integrate(pendulum_rhs(params), params.u0, cfg)


def run_engine(mode, cfg, n=100, seed=0):
    """(record, wall seconds) with only the integration timed.

    Parameter/sample construction happens outside the clock so engines are
    compared on propagation cost alone.
    """
    import time

    params = pendulum_params(mode, n=n, seed=seed)
    if mode == "naive":
        start = time.perf_counter()
        record = _integrate_naive(params, cfg)
        elapsed = time.perf_counter() - start
    else:
        rhs = pendulum_rhs(params)
        start = time.perf_counter()
        record = integrate(rhs, params.u0, cfg)
        elapsed = time.perf_counter() - start
    return record, elapsed


def trajectory_stats(record, component=1, engine=None):
    """Per-time summary (mean, std, 5%/95% quantiles) of one state component.

    Particles use sample statistics and empirical quantiles; sigma-point
    trajectories use the population convention (divisor N) and a normal
    fit for the quantiles, matching their equal-weight construction;
    LinUncertain uses its first-order std with normal quantiles.
    """
    mean, std, q05, q95 = [], [], [], []
    for x in record.component(component):
        if isinstance(x, Particles):
            if engine == "sigma":
                m = float(np.mean(x.samples))
                s = float(np.std(x.samples))  # population divisor: equal-weight point set
                lo, hi = m - _Z95 * s, m + _Z95 * s
            else:
                m, s = x.mean(), x.std()
                lo, hi = x.quantile(0.05), x.quantile(0.95)
        elif isinstance(x, LinUncertain):
            m, s = x.value, x.std
            lo, hi = m - _Z95 * s, m + _Z95 * s
        else:
            m, s = float(x), 0.0
            lo = hi = float(x)
        mean.append(m)
        std.append(s)
        q05.append(lo)
        q95.append(hi)
    return {
        "t": np.asarray(record.times),
        "mean": np.asarray(mean),
        "std": np.asarray(std),
        "q05": np.asarray(q05),
        "q95": np.asarray(q95),
    }


def component_samples(record, component=1):
    """(times, n x T sample matrix) for a Particles trajectory (wide export)."""
    comps = record.component(component)
    if not isinstance(comps[0], Particles):
        raise TypeError("per-sample export needs a Particles trajectory")
    matrix = np.column_stack([x.samples for x in comps])
    return record.times, matrix
