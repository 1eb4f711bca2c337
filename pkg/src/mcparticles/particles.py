"""Uncertain numbers represented by a fixed-count vector of unweighted samples.

A :class:`Particles` value holds N samples of a scalar random quantity and
overloads arithmetic so that ordinary numeric code propagates the whole
sample cloud in one pass.  Sample order is meaningful: index i of every
Particles value refers to the same underlying random draw, which is what
makes an expression like ``p - p`` exactly zero at every sample.
"""

import csv
import enum
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import kernels

__all__ = [
    "ComparisonPolicy",
    "Particles",
    "SampleCountError",
    "StaticParticles",
    "SummaryStats",
    "UncertainComparisonError",
    "compare",
    "cov",
    "kde",
    "lift_nary",
    "lift_unary",
    "set_default_comparison",
]

_SCALAR_TYPES = (float, int, np.floating, np.integer)


class SampleCountError(ValueError):
    """Raised when two Particles with different sample counts are combined."""


class UncertainComparisonError(ValueError):
    """Raised when a comparison on uncertain values has no unambiguous answer."""


class ComparisonPolicy(enum.Enum):
    """How ``<``, ``>``, ``==`` etc. behave on Particles.

    UNANIMOUS  return the shared outcome when every sample agrees, error otherwise.
    BY_MEAN    compare the means.
    FORBIDDEN  always error.
    """

    UNANIMOUS = "unanimous"
    BY_MEAN = "by_mean"
    FORBIDDEN = "forbidden"


_default_policy = ComparisonPolicy.UNANIMOUS


def set_default_comparison(policy):
    """Set the process-wide comparison policy; returns the previous one.

    Intended to be called once at startup.  Individual comparisons can
    still pass an explicit policy to :func:`compare`.
    """
    global _default_policy
    previous = _default_policy
    _default_policy = ComparisonPolicy(policy)
    return previous


@dataclass(frozen=True)
class SummaryStats:
    """Descriptive statistics of one Particles value."""

    mean: float
    std: float
    var: float
    min: float
    max: float
    quantiles: tuple  # ((probability, value), ...)


_RELATION_FNS = {
    "<": np.less,
    "<=": np.less_equal,
    ">": np.greater,
    ">=": np.greater_equal,
    "==": np.equal,
    "!=": np.not_equal,
}

# populated by mcparticles.umath at import time
_UFUNC_HANDLERS = {}


def _register_ufunc_handlers(mapping):
    _UFUNC_HANDLERS.update(mapping)


class Particles:
    """N unweighted samples treated as a single uncertain scalar.

    Values are immutable: every operation returns a new Particles and the
    sample buffer is marked read-only, so values can be shared freely
    across threads.  Arithmetic with another Particles requires an exact
    sample-count match; scalars broadcast to all samples.  Per-sample
    domain violations (``1/0``, ``log`` of a negative sample) produce
    non-finite samples that are preserved, not repaired.
    """

    __slots__ = ("_samples",)

    DEFAULT_N = 500

    def __init__(self, samples):
        arr = np.array(samples, dtype=np.float64, copy=True, order="C")
        if arr.ndim != 1:
            raise ValueError(f"samples must be one-dimensional, got shape {arr.shape}")
        if arr.shape[0] == 0:
            raise ValueError("a Particles value needs at least one sample")
        self._samples = arr

    @classmethod
    def from_samples(cls, values):
        """Construct from an explicit sample vector (order preserved)."""
        return cls(values)

    @classmethod
    def _wrap(cls, arr):
        # internal: adopt a freshly allocated contiguous float64 array, no copy
        obj = object.__new__(cls)
        obj._samples = arr
        return obj

    # -- basic introspection ------------------------------------------------

    @property
    def samples(self):
        """The underlying sample vector (read-only numpy array)."""
        arr = self._samples
        arr.flags.writeable = False  # freeze on exposure; ops never mutate buffers
        return arr

    @property
    def n(self):
        """Sample count, fixed at construction."""
        return self._samples.shape[0]

    def __len__(self):
        return self._samples.shape[0]

    # -- statistics ----------------------------------------------------------

    def mean(self):
        return float(np.mean(self._samples))

    def std(self):
        """Sample standard deviation (divisor N-1); 0.0 for a single sample."""
        if self._samples.shape[0] < 2:
            return 0.0
        return float(np.std(self._samples, ddof=1))

    def var(self):
        if self._samples.shape[0] < 2:
            return 0.0
        return float(np.var(self._samples, ddof=1))

    def min(self):
        return float(np.min(self._samples))

    def max(self):
        return float(np.max(self._samples))

    def quantile(self, q):
        """Empirical quantile with linear interpolation (position q*(N-1))."""
        q_arr = np.asarray(q, dtype=np.float64)
        if np.any(q_arr < 0.0) or np.any(q_arr > 1.0):
            raise ValueError(f"quantile probability must be in [0, 1], got {q}")
        result = np.quantile(self._samples, q_arr)
        return float(result) if np.isscalar(q) or q_arr.ndim == 0 else result

    def summary(self, probs=(0.05, 0.25, 0.5, 0.75, 0.95)):
        qs = tuple((float(p), float(np.quantile(self._samples, p))) for p in probs)
        return SummaryStats(mean=self.mean(), std=self.std(), var=self.var(),
                            min=self.min(), max=self.max(), quantiles=qs)

    # -- rendering -----------------------------------------------------------

    _PREFIX = "P"

    def __repr__(self):
        return f"{self._PREFIX}{self.n}({self.mean():.4g} ± {self.std():.3g})"

    __str__ = __repr__

    # -- arithmetic ----------------------------------------------------------

    def _other_samples(self, other):
        o = other._samples
        if o.shape[0] != self._samples.shape[0]:
            raise SampleCountError(
                f"sample count mismatch: {self._samples.shape[0]} vs {o.shape[0]} "
                "(no automatic resampling or recycling)")
        return o

    def __add__(self, other):
        if isinstance(other, Particles):
            return type(self)._wrap(kernels.add_aa(self._samples, self._other_samples(other)))
        if isinstance(other, _SCALAR_TYPES):
            return type(self)._wrap(kernels.add_as(self._samples, float(other)))
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Particles):
            return type(self)._wrap(kernels.sub_aa(self._samples, self._other_samples(other)))
        if isinstance(other, _SCALAR_TYPES):
            return type(self)._wrap(kernels.sub_as(self._samples, float(other)))
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            return type(self)._wrap(kernels.sub_sa(float(other), self._samples))
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Particles):
            return type(self)._wrap(kernels.mul_aa(self._samples, self._other_samples(other)))
        if isinstance(other, _SCALAR_TYPES):
            return type(self)._wrap(kernels.mul_as(self._samples, float(other)))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Particles):
            return type(self)._wrap(kernels.div_aa(self._samples, self._other_samples(other)))
        if isinstance(other, _SCALAR_TYPES):
            return type(self)._wrap(kernels.div_as(self._samples, float(other)))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            return type(self)._wrap(kernels.div_sa(float(other), self._samples))
        return NotImplemented

    def __pow__(self, other):
        if isinstance(other, Particles):
            return type(self)._wrap(kernels.pow_aa(self._samples, self._other_samples(other)))
        if isinstance(other, _SCALAR_TYPES):
            return type(self)._wrap(kernels.pow_as(self._samples, float(other)))
        return NotImplemented

    def __rpow__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            return type(self)._wrap(kernels.pow_sa(float(other), self._samples))
        return NotImplemented

    def __neg__(self):
        return type(self)._wrap(kernels.neg_a(self._samples))

    def __pos__(self):
        return self

    def __abs__(self):
        return type(self)._wrap(kernels.abs_a(self._samples))

    # -- comparisons ---------------------------------------------------------

    def __lt__(self, other):
        return compare(self, other, "<")

    def __le__(self, other):
        return compare(self, other, "<=")

    def __gt__(self, other):
        return compare(self, other, ">")

    def __ge__(self, other):
        return compare(self, other, ">=")

    def __eq__(self, other):
        if not isinstance(other, (Particles,) + _SCALAR_TYPES):
            return NotImplemented
        return compare(self, other, "==")

    def __ne__(self, other):
        if not isinstance(other, (Particles,) + _SCALAR_TYPES):
            return NotImplemented
        return compare(self, other, "!=")

    __hash__ = None

    def __bool__(self):
        raise TypeError("truth value of Particles is ambiguous; compare explicitly "
                        "(e.g. `p > 0`) under a ComparisonPolicy, or lift the "
                        "branching function with lift_unary")

    def __float__(self):
        raise TypeError("Particles cannot collapse to a single float; use .mean(), "
                        ".samples, or mcparticles.umath functions")

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        # lets numpy scalars and np.sin & co. defer to our semantics
        if method != "__call__" or kwargs:
            return NotImplemented
        handler = _UFUNC_HANDLERS.get(ufunc)
        if handler is None:
            return NotImplemented
        coerced = []
        for x in inputs:
            if isinstance(x, Particles):
                coerced.append(x)
            elif isinstance(x, _SCALAR_TYPES):
                coerced.append(float(x))
            elif isinstance(x, np.ndarray) and x.ndim == 0:
                coerced.append(float(x))
            else:
                return NotImplemented
        return handler(*coerced)

    # -- serialization -------------------------------------------------------

    def to_csv(self, file):
        """Write one ``index,value`` row per sample (RFC 4180, shortest round-trip floats)."""
        if isinstance(file, (str, bytes)) or hasattr(file, "__fspath__"):
            with open(file, "w", newline="", encoding="utf-8") as fh:
                self.to_csv(fh)
            return
        writer = csv.writer(file)
        writer.writerow(["index", "value"])
        for i, v in enumerate(self._samples):
            writer.writerow([i, repr(float(v))])

    @classmethod
    def from_csv(cls, file):
        if isinstance(file, (str, bytes)) or hasattr(file, "__fspath__"):
            with open(file, "r", newline="", encoding="utf-8") as fh:
                return cls.from_csv(fh)
        reader = csv.reader(file)
        header = next(reader, None)
        if header is None or header[:2] != ["index", "value"]:
            raise ValueError("expected a CSV with an 'index,value' header")
        values = [float(row[1]) for row in reader if row]
        return cls(values)

    def to_json(self):
        """JSON array of the samples (shortest round-trip floats)."""
        return json.dumps([float(v) for v in self._samples])

    @classmethod
    def from_json(cls, text):
        return cls(json.loads(text))


class StaticParticles(Particles):
    """Small-count flavor mirroring the compact variant of the uncertain type.

    Python has no compile-time array sizes, so this differs from
    :class:`Particles` only in its default count and rendering prefix; all
    operation contracts are identical.
    """

    __slots__ = ()

    DEFAULT_N = 100
    _PREFIX = "SP"


def compare(a, b, relation, policy=None):
    """Compare Particles ``a`` with ``b`` (Particles or real) under a policy.

    UNANIMOUS returns the relation's value only when it is identical at
    every sample index; mixed outcomes raise
    :class:`UncertainComparisonError` reporting the split.
    """
    if relation not in _RELATION_FNS:
        raise ValueError(f"unknown relation {relation!r}")
    if policy is None:
        policy = _default_policy
    else:
        policy = ComparisonPolicy(policy)

    if policy is ComparisonPolicy.FORBIDDEN:
        raise UncertainComparisonError(
            f"comparison {relation!r} on uncertain values is forbidden by policy; "
            "wrap the branching code with lift_unary so each sample takes its own branch")

    if isinstance(b, Particles):
        b_vals = a._other_samples(b)
        b_mean = b.mean()
    elif isinstance(b, _SCALAR_TYPES):
        b_vals = float(b)
        b_mean = float(b)
    else:
        raise TypeError(f"cannot compare Particles with {type(b).__name__}")

    if policy is ComparisonPolicy.BY_MEAN:
        return bool(_RELATION_FNS[relation](a.mean(), b_mean))

    outcomes = _RELATION_FNS[relation](a._samples, b_vals)
    n_true = int(np.count_nonzero(outcomes))
    n = outcomes.shape[0]
    if n_true == n:
        return True
    if n_true == 0:
        return False
    raise UncertainComparisonError(
        f"uncertain comparison: {relation!r} holds for {n_true}/{n} samples "
        f"({100.0 * n_true / n:.1f}% true, {100.0 * (n - n_true) / n:.1f}% false); "
        "use ComparisonPolicy.BY_MEAN or lift the branching function")


def lift_unary(f, thread_safe=False):
    """Lift a scalar function to Particles, applying it sample by sample.

    ``f`` sees plain floats, so arbitrary control flow inside it is fine.
    Samples are evaluated sequentially unless ``thread_safe=True``, in
    which case a thread pool may be used.
    """
    def lifted(p):
        if not isinstance(p, Particles):
            raise TypeError("lifted function expects a Particles argument")
        values = p._samples
        if thread_safe:
            with ThreadPoolExecutor() as pool:
                out = np.fromiter(pool.map(f, values), dtype=np.float64, count=len(values))
        else:
            out = np.fromiter((f(float(v)) for v in values), dtype=np.float64,
                              count=len(values))
        return type(p)._wrap(out)

    lifted.__name__ = f"lifted_{getattr(f, '__name__', 'fn')}"
    return lifted


def lift_nary(f, thread_safe=False):
    """Lift a k-argument scalar function; Particles arguments are walked
    index-aligned and plain reals broadcast. At least one argument must be
    Particles."""
    def lifted(*args):
        n = None
        cls = Particles
        for a in args:
            if isinstance(a, Particles):
                cls = type(a) if n is None else cls
                if n is None:
                    n = a.n
                elif a.n != n:
                    raise SampleCountError(f"sample count mismatch: {n} vs {a.n}")
        if n is None:
            raise TypeError("lifted function needs at least one Particles argument")
        cols = [a._samples if isinstance(a, Particles) else float(a) for a in args]

        def at(i):
            return f(*(c[i] if isinstance(c, np.ndarray) else c for c in cols))

        if thread_safe:
            with ThreadPoolExecutor() as pool:
                out = np.fromiter(pool.map(at, range(n)), dtype=np.float64, count=n)
        else:
            out = np.fromiter((at(i) for i in range(n)), dtype=np.float64, count=n)
        return cls._wrap(out)

    lifted.__name__ = f"lifted_{getattr(f, '__name__', 'fn')}"
    return lifted


def cov(particles):
    """Sample covariance matrix (divisor N-1) of k index-aligned Particles."""
    ps = list(particles)
    if not ps:
        raise ValueError("cov needs at least one Particles value")
    n = ps[0].n
    for p in ps[1:]:
        if p.n != n:
            raise SampleCountError(f"sample count mismatch: {n} vs {p.n}")
    if n < 2:
        raise ValueError("cov needs at least two samples")
    matrix = np.vstack([p.samples for p in ps])
    return np.atleast_2d(np.cov(matrix, ddof=1))


def kde(p, grid, bandwidth=None):
    """Gaussian kernel density estimate of the sample cloud on a grid.

    Returns an array of ``(point, density)`` rows.  ``bandwidth=None``
    uses Silverman's rule ``1.06 * std * N**(-1/5)``; if the samples are
    degenerate (zero spread) the grid spacing is used instead.
    """
    grid_arr = np.asarray(grid, dtype=np.float64)
    if grid_arr.ndim != 1 or grid_arr.shape[0] == 0:
        raise ValueError("grid must be a nonempty 1-D sequence")
    if np.any(np.diff(grid_arr) < 0):
        raise ValueError("grid must be sorted in ascending order")
    n = p.n
    if bandwidth is None:
        bandwidth = 1.06 * p.std() * n ** (-0.2)
        if not bandwidth > 0.0:
            span = float(grid_arr[-1] - grid_arr[0])
            bandwidth = span / grid_arr.shape[0] if span > 0.0 else 1.0
    if not bandwidth > 0.0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    z = (grid_arr[:, None] - p.samples[None, :]) / bandwidth
    density = np.exp(-0.5 * z * z).sum(axis=1) / (n * bandwidth * math.sqrt(2.0 * math.pi))
    return np.column_stack([grid_arr, density])
