"""Command-line harness: demo session, sampling, multivariate covariance
check, pendulum simulation, robust optimization, and the engine benchmark.

Every command is deterministic for a fixed ``--seed``; the benchmark's
wall-clock fields are the one documented exception.  Exit codes: 0 ok,
1 runtime failure or failed check, 2 usage error.
"""

import argparse
import contextlib
import csv
import io
import json
import math
import os
import platform
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, umath
from ._backend import available_backends, backend_name, use_backend
from .ode import (ENGINES, IntegratorConfig, component_samples, run_engine,
                  trajectory_stats)
from .particles import Particles, cov
from .robust import DescentConfig, NoFeasiblePoint, default_problem, minimize
from .sampling import Normal, QuantileFn, Uniform, from_distribution, pm, random_samples, systematic_samples

# benchmark rows are reported for these engines, in this order
BENCH_ENGINES = ("scalar64", "linear", "mc", "sigma", "naive")


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json_dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# -- demo -----------------------------------------------------------------------

def _poisson_quantile(rate):
    """Step quantile function of a Poisson distribution: smallest k with CDF(k) >= u."""
    def quantile(u):
        k = 0
        pmf = math.exp(-rate)
        cdf = pmf
        while cdf < u and k < 100_000:
            k += 1
            pmf *= rate / k
            cdf += pmf
        return float(k)
    return quantile


def cmd_demo(args):
    """Interactive-session style walkthrough of the uncertain-number type,
    with self-checks on the printed values."""
    rng = np.random.default_rng(args.seed)
    lines = []
    checks = []

    def check(ok, label):
        checks.append(ok)
        lines.append(f"[{'PASS' if ok else 'FAIL'}] {label}")

    a = pm(math.pi, 0.1, 500, rng)
    lines.append(">>> a = pm(pi, 0.1)          # Gaussian uncertain value, 500 samples")
    lines.append(repr(a))
    check(repr(a) == "P500(3.142 ± 0.1)", "rendering is P500(3.142 ± 0.1)")

    lines.append(">>> a.std()")
    lines.append(repr(a.std()))
    check(abs(a.std() / 0.1 - 1.0) < 0.005, "std within 0.5% of 0.1")

    s = umath.sin(a)
    lines.append(">>> sin(a)                   # works like any real number")
    lines.append(repr(s))
    check(abs(s.std() / 0.0995 - 1.0) < 0.02 and abs(s.mean()) < 1e-3,
          "sin std within 2% of 0.0995 and |mean| < 1e-3")

    resid = umath.sin(a) / umath.cos(a) - umath.tan(a)
    lines.append(">>> sin(a)/cos(a) - tan(a)   # self-correlation cancels exactly")
    lines.append(repr(resid))
    worst = abs(resid).max()
    lines.append(f"max |residual| = {worst!r}")
    check(worst <= 1e-12, "self-correlation residual <= 1e-12")

    c = from_distribution(QuantileFn(_poisson_quantile(3.0)), 500, rng)
    lines.append(">>> c = from_distribution(QuantileFn(poisson(3)), 500)")
    lines.append(repr(c))
    check(abs(c.mean() / 3.0 - 1.0) < 0.05 and abs(c.std() / math.sqrt(3.0) - 1.0) < 0.10,
          "discrete sampling: mean within 5% of 3, std within 10% of sqrt(3)")

    ok = all(checks)
    lines.append(f"{sum(checks)}/{len(checks)} checks passed")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


# -- sample ---------------------------------------------------------------------

def cmd_sample(args):
    """Draw Particles from a distribution and emit the raw samples."""
    if args.dist == "normal":
        dist = Normal(args.mu, args.sigma)
    else:
        dist = Uniform(args.lo, args.hi)
    rng = np.random.default_rng(args.seed)
    draw = random_samples if args.random else systematic_samples
    p = draw(dist, args.n, rng)
    if args.format == "json":
        _emit(p.to_json() + "\n", args.out)
    else:
        buf = io.StringIO()
        p.to_csv(buf)
        _emit(buf.getvalue(), args.out)
    if args.out is not None:
        print(f"sample dist={args.dist} n={args.n} method="
              f"{'random' if args.random else 'systematic'} -> {args.out}")
    return 0


# -- mv-demo --------------------------------------------------------------------

def cmd_mv_demo(args):
    """Linear transform of a correlated pair: empirical vs closed-form covariance."""
    rng = np.random.default_rng(args.seed)
    p = [pm(1.0, 1.0, args.n, rng), pm(5.0, 2.0, args.n, rng)]
    a_mat = rng.standard_normal((2, 2))
    y = [a_mat[0, 0] * p[0] + a_mat[0, 1] * p[1],
         a_mat[1, 0] * p[0] + a_mat[1, 1] * p[1]]
    cov_emp = cov(y)
    cov_theo = a_mat @ np.diag([1.0, 4.0]) @ a_mat.T
    frob = float(np.linalg.norm(cov_emp - cov_theo) / np.linalg.norm(cov_theo))

    cov_inputs = cov(p)
    identity_ok = (abs(cov_inputs[0, 1]) < 0.1
                   and abs(cov_inputs[0, 0] - 1.0) < 0.1
                   and abs(cov_inputs[1, 1] - 4.0) < 0.4)

    y2 = [2.0 * a_mat[0, 0] * p[0] + 2.0 * a_mat[0, 1] * p[1],
          2.0 * a_mat[1, 0] * p[0] + 2.0 * a_mat[1, 1] * p[1]]
    doubling_ok = all(abs(y2[i].std() / (2.0 * y[i].std()) - 1.0) < 1e-12 for i in range(2))

    checks = {
        "frobenius_rel_err_lt_5pct": bool(frob < 0.05),
        "identity_cov_matches_diag_1_4": bool(identity_ok),
        "doubling_A_doubles_std": bool(doubling_ok),
    }
    report = {
        "seed": args.seed,
        "n": args.n,
        "transform": a_mat.tolist(),
        "cov_empirical": cov_emp.tolist(),
        "cov_theoretical": cov_theo.tolist(),
        "frobenius_rel_err": frob,
        "checks": checks,
    }
    _emit(_json_dumps(report), args.out)
    return 0 if all(checks.values()) else 1


# -- pendulum -------------------------------------------------------------------

def cmd_pendulum(args):
    """Simulate the benchmark pendulum under one propagation engine."""
    cfg = IntegratorConfig(dt=args.dt, t_end=args.t_end, record_every=args.record_every)
    start = time.perf_counter()
    record, _ = run_engine(args.mode, cfg, n=args.n, seed=args.seed)
    wall_ms = 1000.0 * (time.perf_counter() - start)
    component = 1 if args.component == "theta" else 0

    if args.wide:
        times, matrix = component_samples(record, component)
        header = ["t"] + [f"s{i + 1}" for i in range(matrix.shape[0])]
        rows = [[float(t)] + [float(v) for v in matrix[:, j]] for j, t in enumerate(times)]
        text = _csv_text(header, rows)
    else:
        stats = trajectory_stats(record, component, engine=args.mode)
        if args.format == "json":
            payload = {
                "engine": args.mode,
                "n": args.n,
                "dt": args.dt,
                "t_end": args.t_end,
                "seed": args.seed,
                "component": args.component,
                "wall_ms": wall_ms,
                "t": stats["t"].tolist(),
                "mean": stats["mean"].tolist(),
                "std": stats["std"].tolist(),
                "q05": stats["q05"].tolist(),
                "q95": stats["q95"].tolist(),
            }
            text = _json_dumps(payload)
        else:
            rows = zip(stats["t"], stats["mean"], stats["std"], stats["q05"], stats["q95"])
            text = _csv_text(["t", "mean", "std", "q05", "q95"],
                             [[float(v) for v in row] for row in rows])
    _emit(text, args.out)
    if args.out is not None:
        print(f"pendulum mode={args.mode} n={args.n} dt={args.dt} t_end={args.t_end} "
              f"wall_ms={wall_ms:.1f} -> {args.out}")
    return 0


# -- robust ---------------------------------------------------------------------

def cmd_robust(args):
    """Worst-case optimization of the uncertain linear program."""
    prob = default_problem(n=args.n, rng=np.random.default_rng(args.seed),
                           penalty=args.penalty, limit=args.limit,
                           bounds=None if args.unbounded else ((0.0, 0.0), (12.0, 12.0)))
    cfg = DescentConfig(max_iters=args.max_iters)
    result = minimize(prob, (args.x0, args.y0), cfg)
    report = {
        "seed": args.seed,
        "n": args.n,
        "penalty": args.penalty,
        "limit": args.limit,
        "pars0": [args.x0, args.y0],
        "pars": list(result.pars),
        "cost": result.cost,
        "worst_case": result.worst_case,
        "iterations": result.iterations,
    }
    _emit(_json_dumps(report), args.out)
    if args.out is not None:
        print(f"robust n={args.n} pars=({result.pars[0]:.6g}, {result.pars[1]:.6g}) "
              f"cost={result.cost:.6g} worst_case={result.worst_case:.6g} -> {args.out}")
    return 0


# -- bench ----------------------------------------------------------------------

@contextlib.contextmanager
def _pinned_to_one_cpu(enabled):
    """Pin to a single CPU for the duration (restored afterwards) where supported."""
    if not enabled or not hasattr(os, "sched_setaffinity"):
        yield
        return
    try:
        previous = os.sched_getaffinity(0)
        os.sched_setaffinity(0, {min(previous)})
    except OSError:
        yield
        return
    try:
        yield
    finally:
        with contextlib.suppress(OSError):
            os.sched_setaffinity(0, previous)


def run_bench(n=100, dt=0.01, t_end=100.0, seed=0, repeats=5, threads=1,
              compare_backends=False, pin=False):
    """Time all propagation engines on the pendulum; returns the report dict.

    Medians of ``repeats`` runs after one warmup, with the repeats of the
    different engines interleaved so machine-load drift hits all engines
    alike.  ``threads`` parallelizes only the naive per-sample replicates
    (the batched engine stays single-threaded so its timing is honest).
    """
    cfg = IntegratorConfig(dt=dt, t_end=t_end,
                           record_every=max(1, int(round(t_end / dt)) // 50))
    engine_n = {"scalar64": 1, "scalar32": 1, "linear": 1, "mc": n, "sigma": 7, "naive": n}

    def timed_once(mode):
        if mode == "naive" and threads > 1:
            return _naive_threads_wall_ms(cfg, n, seed, threads)
        _, elapsed = run_engine(mode, cfg, n=n, seed=seed)
        return 1000.0 * elapsed

    with _pinned_to_one_cpu(pin):
        samples = {mode: [] for mode in BENCH_ENGINES}
        for mode in BENCH_ENGINES:
            timed_once(mode)  # warmup
        for _ in range(repeats):
            for mode in BENCH_ENGINES:
                samples[mode].append(timed_once(mode))
        walls = {mode: statistics.median(vals) for mode, vals in samples.items()}
        extra_rows = []
        if compare_backends:
            current = backend_name()
            backends = available_backends()
            backend_samples = {b: [] for b in backends}
            for backend in backends:
                use_backend(backend)
                timed_once("mc")  # warmup
            for _ in range(repeats):
                for backend in backends:
                    use_backend(backend)
                    backend_samples[backend].append(timed_once("mc"))
            use_backend(current)
            for backend in backends:
                extra_rows.append((f"mc[{backend}]", n, statistics.median(backend_samples[backend])))

    rows = []
    for mode in BENCH_ENGINES:
        rows.append({
            "engine": mode,
            "n": engine_n[mode],
            "wall_ms": walls[mode],
            "speedup_vs_naive": walls["naive"] / walls[mode],
            "normalized_vs_mc": walls[mode] / walls["mc"],
        })
    for label, count, wall in extra_rows:
        rows.append({
            "engine": label,
            "n": count,
            "wall_ms": wall,
            "speedup_vs_naive": walls["naive"] / wall,
            "normalized_vs_mc": wall / walls["mc"],
        })
    return {
        "rows": rows,
        "meta": {
            "seed": seed,
            "n": n,
            "dt": dt,
            "t_end": t_end,
            "repeats": repeats,
            "threads": threads,
            "backend": backend_name(),
            "host": f"{platform.platform()} / Python {platform.python_version()} / numpy {np.__version__}",
        },
    }


def _naive_threads_wall_ms(cfg, n, seed, threads):
    """One naive-engine run with per-sample replicates spread over a thread pool."""
    from .ode import PendulumParams, integrate, pendulum_params, pendulum_rhs

    params = pendulum_params("naive", n=n, seed=seed)
    scalars = [
        PendulumParams(float(params.g.samples[i]), float(params.L.samples[i]),
                       (float(params.u0[0].samples[i]), float(params.u0[1].samples[i])))
        for i in range(n)
    ]

    def one(p):
        return integrate(pendulum_rhs(p), p.u0, cfg)

    start = time.perf_counter()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(one, scalars))
    return 1000.0 * (time.perf_counter() - start)


def cmd_bench(args):
    report = run_bench(n=args.n, dt=args.dt, t_end=args.t_end, seed=args.seed,
                       repeats=args.repeats, threads=args.threads,
                       compare_backends=args.compare_backends, pin=not args.no_pin)
    header = ["engine", "n", "wall_ms", "speedup_vs_naive", "normalized_vs_mc"]
    if args.format == "csv":
        text = _csv_text(header, [[r[k] for k in header] for r in report["rows"]])
    else:
        text = _json_dumps(report)
    _emit(text, args.out)
    if args.out is not None or args.format == "json":
        print(f"{'engine':<14}{'n':>6}{'wall_ms':>12}{'vs naive':>10}{'vs mc':>8}")
        for r in report["rows"]:
            print(f"{r['engine']:<14}{r['n']:>6}{r['wall_ms']:>12.2f}"
                  f"{r['speedup_vs_naive']:>9.1f}x{r['normalized_vs_mc']:>8.2f}")
    return 0


# -- argument parsing -----------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="mcparticles",
        description="Monte-Carlo uncertain numbers: demos and benchmarks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for the PCG64 generator")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo", parents=[common], help="annotated uncertain-number session")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("sample", parents=[common], help="draw samples from a distribution")
    p.add_argument("--dist", choices=("normal", "uniform"), default="normal")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--n", type=int, default=Particles.DEFAULT_N)
    method = p.add_mutually_exclusive_group()
    method.add_argument("--systematic", dest="random", action="store_false",
                        help="midpoint-quantile sampling (default)")
    method.add_argument("--random", dest="random", action="store_true",
                        help="i.i.d. sampling")
    p.set_defaults(func=cmd_sample, random=False)

    p = sub.add_parser("mv-demo", parents=[common],
                       help="correlated-pair covariance vs closed form")
    p.add_argument("--n", type=int, default=500)
    p.set_defaults(func=cmd_mv_demo)

    p = sub.add_parser("pendulum", parents=[common], help="simulate the benchmark pendulum")
    p.add_argument("--mode", choices=ENGINES, default="mc")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=0.5)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--component", choices=("theta", "omega"), default="theta")
    p.add_argument("--wide", action="store_true", help="per-sample wide CSV (t,s1..sN)")
    p.set_defaults(func=cmd_pendulum)

    p = sub.add_parser("robust", parents=[common], help="worst-case optimization")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--penalty", type=float, default=10000.0)
    p.add_argument("--limit", type=float, default=10.0)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--y0", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--unbounded", action="store_true",
                   help="drop the [0,12]^2 decision box")
    p.set_defaults(func=cmd_robust)

    p = sub.add_parser("bench", parents=[common], help="time all propagation engines")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--threads", type=int, default=1,
                   help="parallel naive replicates only")
    p.add_argument("--compare-backends", action="store_true",
                   help="also time the batched engine under every kernel backend")
    p.add_argument("--no-pin", action="store_true", help="skip CPU pinning")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TypeError, NoFeasiblePoint, FloatingPointError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
