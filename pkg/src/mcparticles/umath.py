"""Elementary math functions generic over plain reals, Particles and LinUncertain.

Generic numeric code should call these instead of the ``math`` module:
``umath.sin(x)`` applies per-sample for Particles, applies the chain rule
for LinUncertain, and reduces to the backend's scalar routine for plain
reals.  Scalar and batched paths share the same underlying libm/numpy
implementation, so a batched evaluation is bitwise-identical to an
index-by-index scalar evaluation.
"""

import operator

import numpy as np

from . import particles as _p
from ._backend import kernels
from .linear import LinUncertain, lin_combine
from .particles import Particles

__all__ = [
    "sin", "cos", "tan", "asin", "acos", "atan", "sinh", "cosh", "tanh",
    "exp", "log", "sqrt", "fabs", "floor", "ceil",
    "atan2", "hypot", "minimum", "maximum",
]


def _mixed(a, b):
    return TypeError(
        f"cannot mix {type(a).__name__} and {type(b).__name__} in one expression; "
        "pick one propagation engine per computation")


def sin(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.sin_a(x._samples))
    if isinstance(x, LinUncertain):
        return x._chain(kernels.sin_s(x.value), kernels.cos_s(x.value))
    if isinstance(x, np.float32):
        return np.sin(x)
    return kernels.sin_s(x)


def cos(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.cos_a(x._samples))
    if isinstance(x, LinUncertain):
        return x._chain(kernels.cos_s(x.value), -kernels.sin_s(x.value))
    if isinstance(x, np.float32):
        return np.cos(x)
    return kernels.cos_s(x)


def tan(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.tan_a(x._samples))
    if isinstance(x, LinUncertain):
        t = kernels.tan_s(x.value)
        return x._chain(t, 1.0 + t * t)
    if isinstance(x, np.float32):
        return np.tan(x)
    return kernels.tan_s(x)


def asin(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.asin_a(x._samples))
    if isinstance(x, LinUncertain):
        v = x.value
        d = 1.0 / kernels.sqrt_s(1.0 - v * v) if abs(v) < 1.0 else float("inf")
        return x._chain(kernels.asin_s(v), d)
    if isinstance(x, np.float32):
        return np.arcsin(x)
    return kernels.asin_s(x)


def acos(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.acos_a(x._samples))
    if isinstance(x, LinUncertain):
        v = x.value
        d = -1.0 / kernels.sqrt_s(1.0 - v * v) if abs(v) < 1.0 else float("inf")
        return x._chain(kernels.acos_s(v), d)
    if isinstance(x, np.float32):
        return np.arccos(x)
    return kernels.acos_s(x)


def atan(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.atan_a(x._samples))
    if isinstance(x, LinUncertain):
        v = x.value
        return x._chain(kernels.atan_s(v), 1.0 / (1.0 + v * v))
    if isinstance(x, np.float32):
        return np.arctan(x)
    return kernels.atan_s(x)


def sinh(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.sinh_a(x._samples))
    if isinstance(x, LinUncertain):
        return x._chain(kernels.sinh_s(x.value), kernels.cosh_s(x.value))
    if isinstance(x, np.float32):
        return np.sinh(x)
    return kernels.sinh_s(x)


def cosh(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.cosh_a(x._samples))
    if isinstance(x, LinUncertain):
        return x._chain(kernels.cosh_s(x.value), kernels.sinh_s(x.value))
    if isinstance(x, np.float32):
        return np.cosh(x)
    return kernels.cosh_s(x)


def tanh(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.tanh_a(x._samples))
    if isinstance(x, LinUncertain):
        t = kernels.tanh_s(x.value)
        return x._chain(t, 1.0 - t * t)
    if isinstance(x, np.float32):
        return np.tanh(x)
    return kernels.tanh_s(x)


def exp(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.exp_a(x._samples))
    if isinstance(x, LinUncertain):
        v = kernels.exp_s(x.value)
        return x._chain(v, v)
    if isinstance(x, np.float32):
        return np.exp(x)
    return kernels.exp_s(x)


def log(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.log_a(x._samples))
    if isinstance(x, LinUncertain):
        v = x.value
        return x._chain(kernels.log_s(v), 1.0 / v if v > 0.0 else float("inf"))
    if isinstance(x, np.float32):
        return np.log(x)
    return kernels.log_s(x)


def sqrt(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.sqrt_a(x._samples))
    if isinstance(x, LinUncertain):
        v = x.value
        r = kernels.sqrt_s(v)
        return x._chain(r, 0.5 / r if v > 0.0 else float("inf"))
    if isinstance(x, np.float32):
        return np.sqrt(x)
    return kernels.sqrt_s(x)


def fabs(x):
    if isinstance(x, (Particles, LinUncertain)):
        return abs(x)
    if isinstance(x, np.float32):
        return np.abs(x)
    return kernels.abs_s(x)


def floor(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.floor_a(x._samples))
    if isinstance(x, LinUncertain):
        return x._chain(kernels.floor_s(x.value), 0.0)  # locally constant a.e.
    if isinstance(x, np.float32):
        return np.floor(x)
    return kernels.floor_s(x)


def ceil(x):
    if isinstance(x, Particles):
        return type(x)._wrap(kernels.ceil_a(x._samples))
    if isinstance(x, LinUncertain):
        return x._chain(kernels.ceil_s(x.value), 0.0)
    if isinstance(x, np.float32):
        return np.ceil(x)
    return kernels.ceil_s(x)


# -- two-argument functions ---------------------------------------------------

def atan2(y, x):
    if isinstance(y, Particles) or isinstance(x, Particles):
        if isinstance(y, LinUncertain) or isinstance(x, LinUncertain):
            raise _mixed(y, x)
        if isinstance(y, Particles) and isinstance(x, Particles):
            return type(y)._wrap(kernels.atan2_aa(y._samples, y._other_samples(x)))
        if isinstance(y, Particles):
            return type(y)._wrap(kernels.atan2_as(y._samples, float(x)))
        return type(x)._wrap(kernels.atan2_sa(float(y), x._samples))
    if isinstance(y, LinUncertain) or isinstance(x, LinUncertain):
        cy = y.value if isinstance(y, LinUncertain) else float(y)
        cx = x.value if isinstance(x, LinUncertain) else float(x)
        r2 = cx * cx + cy * cy
        dy = cx / r2 if r2 != 0.0 else float("inf")
        dx = -cy / r2 if r2 != 0.0 else float("inf")
        return lin_combine(y, x, kernels.atan2_s(cy, cx), dy, dx)
    return kernels.atan2_s(y, x)


def hypot(x, y):
    if isinstance(x, Particles) or isinstance(y, Particles):
        if isinstance(x, LinUncertain) or isinstance(y, LinUncertain):
            raise _mixed(x, y)
        if isinstance(x, Particles) and isinstance(y, Particles):
            return type(x)._wrap(kernels.hypot_aa(x._samples, x._other_samples(y)))
        if isinstance(x, Particles):
            return type(x)._wrap(kernels.hypot_as(x._samples, float(y)))
        return type(y)._wrap(kernels.hypot_as(y._samples, float(x)))
    if isinstance(x, LinUncertain) or isinstance(y, LinUncertain):
        cx = x.value if isinstance(x, LinUncertain) else float(x)
        cy = y.value if isinstance(y, LinUncertain) else float(y)
        h = kernels.hypot_s(cx, cy)
        dx = cx / h if h != 0.0 else float("inf")
        dy = cy / h if h != 0.0 else float("inf")
        return lin_combine(x, y, h, dx, dy)
    return kernels.hypot_s(x, y)


def minimum(a, b):
    """Elementwise minimum (IEEE fmin semantics: a NaN operand is ignored)."""
    if isinstance(a, Particles) or isinstance(b, Particles):
        if isinstance(a, LinUncertain) or isinstance(b, LinUncertain):
            raise _mixed(a, b)
        if isinstance(a, Particles) and isinstance(b, Particles):
            return type(a)._wrap(kernels.min_aa(a._samples, a._other_samples(b)))
        if isinstance(a, Particles):
            return type(a)._wrap(kernels.min_as(a._samples, float(b)))
        return type(b)._wrap(kernels.min_as(b._samples, float(a)))
    if isinstance(a, LinUncertain) or isinstance(b, LinUncertain):
        ca = a.value if isinstance(a, LinUncertain) else float(a)
        cb = b.value if isinstance(b, LinUncertain) else float(b)
        return a if ca <= cb else b  # branch chosen at the center
    return kernels.min_s(a, b)


def maximum(a, b):
    """Elementwise maximum (IEEE fmax semantics: a NaN operand is ignored)."""
    if isinstance(a, Particles) or isinstance(b, Particles):
        if isinstance(a, LinUncertain) or isinstance(b, LinUncertain):
            raise _mixed(a, b)
        if isinstance(a, Particles) and isinstance(b, Particles):
            return type(a)._wrap(kernels.max_aa(a._samples, a._other_samples(b)))
        if isinstance(a, Particles):
            return type(a)._wrap(kernels.max_as(a._samples, float(b)))
        return type(b)._wrap(kernels.max_as(b._samples, float(a)))
    if isinstance(a, LinUncertain) or isinstance(b, LinUncertain):
        ca = a.value if isinstance(a, LinUncertain) else float(a)
        cb = b.value if isinstance(b, LinUncertain) else float(b)
        return a if ca >= cb else b
    return kernels.max_s(a, b)


# numpy interop: np.sin(p), np.float64(2) * p etc. route through the
# handlers below via Particles.__array_ufunc__
_p._register_ufunc_handlers({
    np.add: operator.add,
    np.subtract: operator.sub,
    np.multiply: operator.mul,
    np.true_divide: operator.truediv,
    np.power: operator.pow,
    np.negative: operator.neg,
    np.positive: operator.pos,
    np.absolute: abs,
    np.fabs: abs,
    np.square: lambda x: x * x,
    np.sin: sin,
    np.cos: cos,
    np.tan: tan,
    np.arcsin: asin,
    np.arccos: acos,
    np.arctan: atan,
    np.sinh: sinh,
    np.cosh: cosh,
    np.tanh: tanh,
    np.exp: exp,
    np.log: log,
    np.sqrt: sqrt,
    np.floor: floor,
    np.ceil: ceil,
    np.arctan2: atan2,
    np.hypot: hypot,
    np.minimum: minimum,
    np.fmin: minimum,
    np.maximum: maximum,
    np.fmax: maximum,
    np.less: operator.lt,
    np.less_equal: operator.le,
    np.greater: operator.gt,
    np.greater_equal: operator.ge,
    np.equal: operator.eq,
    np.not_equal: operator.ne,
})
