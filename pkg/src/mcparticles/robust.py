"""Worst-case (robust) optimization over uncertain coefficients.

The objective rewards a linear gain ``3x + 2y`` but adds a large penalty
whenever the *worst sample* of ``c*x + d*y`` exceeds a limit, so the
constraint is enforced at the maximum over the particle cloud.  The
solver is a backtracking steepest descent in which the penalty cliff acts
as a barrier; when direct descent stalls on the cliff it slides along the
estimated active-constraint tangent, which is what lets it reach the
constrained optimum instead of stopping where the initial ray hits
the boundary.
"""

import math
from dataclasses import dataclass

import numpy as np

from .particles import Particles
from .sampling import as_generator, pm

__all__ = [
    "DescentConfig",
    "MinimizeResult",
    "NoFeasiblePoint",
    "RobustProblem",
    "default_problem",
    "fd_gradient",
    "minimize",
    "robust_cost",
    "worst_case",
]

DEFAULT_BOUNDS = ((0.0, 0.0), (12.0, 12.0))


class NoFeasiblePoint(RuntimeError):
    """Raised when descent never reaches the feasible region."""


@dataclass
class RobustProblem:
    """Uncertain coefficients plus penalty/limit of the worst-case constraint.

    ``bounds`` is an optional ``((lo_x, lo_y), (hi_x, hi_y))`` box for the
    decision variables (``None`` disables it).  The default box matches
    the domain the solution is validated against.
    """

    c: Particles
    d: Particles
    penalty: float = 10000.0
    limit: float = 10.0
    bounds: tuple = DEFAULT_BOUNDS

    def __post_init__(self):
        if self.c.n != self.d.n:
            raise ValueError(f"c and d must share a sample count, got {self.c.n} vs {self.d.n}")
        if self.penalty < 0.0:
            raise ValueError(f"penalty must be nonnegative, got {self.penalty}")
        if self.bounds is not None:
            (lo_x, lo_y), (hi_x, hi_y) = self.bounds
            if not (hi_x > lo_x and hi_y > lo_y):
                raise ValueError(f"empty bounds box {self.bounds}")


def default_problem(n=500, rng=None, penalty=10000.0, limit=10.0, bounds=DEFAULT_BOUNDS):
    """The benchmark instance: c = 1 +/- 0.1 and d = 1 +/- 0.1."""
    gen = as_generator(rng)
    return RobustProblem(c=pm(1.0, 0.1, n, gen), d=pm(1.0, 0.1, n, gen),
                         penalty=penalty, limit=limit, bounds=bounds)


def worst_case(prob, pars):
    """Maximum over samples of ``c*x + d*y`` at the decision point."""
    x, y = pars
    return (prob.c * float(x) + prob.d * float(y)).max()


def robust_cost(pars, prob):
    """``-(3x + 2y)`` plus the penalty when the worst case exceeds the limit."""
    x, y = float(pars[0]), float(pars[1])
    cost = -(3.0 * x + 2.0 * y)
    if worst_case(prob, (x, y)) > prob.limit:
        cost += prob.penalty
    return cost


def fd_gradient(f, pars, h=None):
    """Central-difference gradient of ``f`` at ``pars``.

    ``h`` may be a scalar, a per-coordinate sequence, or None for the
    default ``1e-6 * (1 + |pars_j|)``.  Non-finite evaluations raise.
    """
    pars = tuple(float(p) for p in pars)
    if h is None:
        steps = [1e-6 * (1.0 + abs(p)) for p in pars]
    elif isinstance(h, (int, float)):
        steps = [float(h)] * len(pars)
    else:
        steps = [float(v) for v in h]
    grad = []
    for j, hj in enumerate(steps):
        up = list(pars)
        down = list(pars)
        up[j] += hj
        down[j] -= hj
        f_up, f_down = f(tuple(up)), f(tuple(down))
        if not (math.isfinite(f_up) and math.isfinite(f_down)):
            raise FloatingPointError(
                f"non-finite objective near {pars} (coordinate {j}: {f_up!r}, {f_down!r})")
        grad.append((f_up - f_down) / (2.0 * hj))
    return tuple(grad)


@dataclass
class DescentConfig:
    """Backtracking steepest-descent settings.

    ``grad_h`` is the relative finite-difference coefficient: the step in
    coordinate j is ``grad_h * (1 + |pars_j|)``.
    """

    step0: float = 1.0
    shrink: float = 0.5
    max_iters: int = 500
    grad_h: float = 1e-6
    tol: float = 1e-8

    def __post_init__(self):
        if not (self.step0 > 0 and 0.0 < self.shrink < 1.0 and self.max_iters >= 1
                and self.grad_h > 0 and self.tol > 0):
            raise ValueError(f"all DescentConfig fields must be positive (shrink in (0,1)): {self}")


@dataclass
class MinimizeResult:
    pars: tuple
    cost: float
    iterations: int
    worst_case: float


def _project(pars, bounds):
    if bounds is None:
        return pars
    lo, hi = bounds
    return tuple(min(max(p, l), h) for p, l, h in zip(pars, lo, hi))


def _feasible_fd_gradient(f, f0, pars, steps, penalty):
    """Central differences, switching to the one-sided feasible probe when
    the other side lands past the penalty cliff."""
    cliff = 0.5 * penalty if penalty > 0 else math.inf
    grad = []
    for j, hj in enumerate(steps):
        up = list(pars)
        down = list(pars)
        up[j] += hj
        down[j] -= hj
        f_up, f_down = f(tuple(up)), f(tuple(down))
        if not (math.isfinite(f_up) and math.isfinite(f_down)):
            raise FloatingPointError(f"non-finite objective near {pars}")
        up_crossed = f_up - f0 > cliff
        down_crossed = f_down - f0 > cliff
        if up_crossed and down_crossed:
            grad.append(0.0)
        elif up_crossed:
            grad.append((f0 - f_down) / hj)
        elif down_crossed:
            grad.append((f_up - f0) / hj)
        else:
            grad.append((f_up - f_down) / (2.0 * hj))
    return tuple(grad)


def _backtrack(f, pars, f_pars, direction, cfg, bounds):
    """First shrinking step along ``direction`` that strictly decreases cost."""
    floor = cfg.step0 * 1e-12
    step = cfg.step0
    while step >= floor:
        cand = _project(tuple(p + step * d for p, d in zip(pars, direction)), bounds)
        if cand != pars:
            f_cand = f(cand)
            if f_cand < f_pars:
                return cand, f_cand
        step *= cfg.shrink
    return None


def _slide_directions(prob, pars, grad):
    """Descent directions tangent to the near-active worst-case constraints.

    The worst case is a max of linear functions of ``pars``, so at the
    cliff the useful moves are along tangents of the (few) samples whose
    constraint is tight.  Candidates must descend the cost and stay
    first-order feasible with respect to every near-active constraint;
    best descent first.  Empty at a constrained optimum.
    """
    x, y = pars
    values = (prob.c * x + prob.d * y).samples
    w_max = float(values.max())
    slack = 1e-8 * max(1.0, abs(w_max))
    active = values >= w_max - slack
    normals = np.unique(np.column_stack([prob.c.samples[active],
                                         prob.d.samples[active]]), axis=0)
    candidates = []
    for qx, qy in normals:
        norm = math.hypot(qx, qy)
        if norm == 0.0:
            continue
        for tx, ty in ((-qy / norm, qx / norm), (qy / norm, -qx / norm)):
            descent = grad[0] * tx + grad[1] * ty
            if descent >= 0.0:
                continue
            if all(ox * tx + oy * ty <= 1e-12 * math.hypot(ox, oy) for ox, oy in normals):
                candidates.append((descent, (tx, ty)))
    candidates.sort(key=lambda item: item[0])
    return [d for _, d in candidates]


def minimize(prob, pars0, cfg=None):
    """Minimize the penalized worst-case objective from ``pars0``.

    Steepest descent with backtracking; steps that land past the penalty
    cliff or outside the bounds are rejected, and when no straight descent
    step is accepted the search slides along the tangent of the active
    worst-case constraint (estimated by finite differences of the
    worst-case value).  Accepted costs are strictly decreasing.  Stops on
    a small gradient, step collapse at a constrained optimum, or
    ``max_iters``.
    """
    if cfg is None:
        cfg = DescentConfig()
    cost = lambda pars: robust_cost(pars, prob)

    pars = _project(tuple(float(p) for p in pars0), prob.bounds)
    if not all(math.isfinite(p) for p in pars):
        raise ValueError(f"pars0 must be finite, got {pars0}")
    f_pars = cost(pars)
    iterations = 0

    for _ in range(cfg.max_iters):
        steps = [cfg.grad_h * (1.0 + abs(p)) for p in pars]
        grad = _feasible_fd_gradient(cost, f_pars, pars, steps, prob.penalty)
        if math.hypot(*grad) < cfg.tol:
            break
        moved = _backtrack(cost, pars, f_pars, tuple(-g for g in grad), cfg, prob.bounds)
        if moved is None:
            # stalled on the cliff: slide along an active-constraint tangent
            for tangent in _slide_directions(prob, pars, grad):
                moved = _backtrack(cost, pars, f_pars, tangent, cfg, prob.bounds)
                if moved is not None:
                    break
        if moved is None:
            break
        pars, f_pars = moved
        iterations += 1

    wc = worst_case(prob, pars)
    if prob.penalty > 0.0 and wc > prob.limit:
        raise NoFeasiblePoint(
            f"descent from {tuple(pars0)} never reached the feasible region "
            f"(worst case {wc:.6g} > limit {prob.limit:.6g}); start from a feasible pars0")
    return MinimizeResult(pars=pars, cost=f_pars, iterations=iterations, worst_case=wc)
