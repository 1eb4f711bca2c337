# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elementwise kernels over contiguous float64 sample buffers.

Every kernel calls the platform libm, and each array kernel has a scalar
twin (``sin_s`` for ``sin_a`` etc.) that calls the *same* libm routine.
This pairing is what makes a batched evaluation bitwise-identical to an
elementwise scalar evaluation of the same expression.

Internal module: array arguments must be one-dimensional contiguous
float64 (the Particles type guarantees this).  Data is accessed through
raw pointers to keep per-call overhead below the numpy ufunc machinery.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport (acos, asin, atan, atan2, ceil, cos, cosh, exp, fabs,
                        floor, fmax, fmin, hypot, log, pow, sin, sinh, sqrt,
                        tan, tanh)

cnp.import_array()

BACKEND_NAME = "compiled"

ctypedef double (*ufn)(double) noexcept nogil
ctypedef double (*bfn)(double, double) noexcept nogil


cdef inline const double* _data(cnp.ndarray a) except NULL:
    if cnp.PyArray_TYPE(a) != cnp.NPY_FLOAT64 or not cnp.PyArray_IS_C_CONTIGUOUS(a) \
            or cnp.PyArray_NDIM(a) != 1:
        raise TypeError("kernel arguments must be 1-D contiguous float64 arrays")
    return <const double*> cnp.PyArray_DATA(a)


cdef inline double _neg(double x) noexcept nogil:
    return -x

cdef inline double _add(double a, double b) noexcept nogil:
    return a + b

cdef inline double _sub(double a, double b) noexcept nogil:
    return a - b

cdef inline double _mul(double a, double b) noexcept nogil:
    return a * b

cdef inline double _div(double a, double b) noexcept nogil:
    return a / b


cdef _map1(ufn f, cnp.ndarray a):
    cdef const double* pa = _data(a)
    cdef cnp.npy_intp i, n = cnp.PyArray_DIM(a, 0)
    cdef cnp.ndarray out = cnp.PyArray_EMPTY(1, &n, cnp.NPY_FLOAT64, 0)
    cdef double* po = <double*> cnp.PyArray_DATA(out)
    for i in range(n):
        po[i] = f(pa[i])
    return out


cdef _map2(bfn f, cnp.ndarray a, cnp.ndarray b):
    cdef const double* pa = _data(a)
    cdef const double* pb = _data(b)
    cdef cnp.npy_intp i, n = cnp.PyArray_DIM(a, 0)
    cdef cnp.ndarray out = cnp.PyArray_EMPTY(1, &n, cnp.NPY_FLOAT64, 0)
    cdef double* po = <double*> cnp.PyArray_DATA(out)
    for i in range(n):
        po[i] = f(pa[i], pb[i])
    return out


cdef _map2s(bfn f, cnp.ndarray a, double b):
    cdef const double* pa = _data(a)
    cdef cnp.npy_intp i, n = cnp.PyArray_DIM(a, 0)
    cdef cnp.ndarray out = cnp.PyArray_EMPTY(1, &n, cnp.NPY_FLOAT64, 0)
    cdef double* po = <double*> cnp.PyArray_DATA(out)
    for i in range(n):
        po[i] = f(pa[i], b)
    return out


cdef _map2r(bfn f, double a, cnp.ndarray b):
    cdef const double* pb = _data(b)
    cdef cnp.npy_intp i, n = cnp.PyArray_DIM(b, 0)
    cdef cnp.ndarray out = cnp.PyArray_EMPTY(1, &n, cnp.NPY_FLOAT64, 0)
    cdef double* po = <double*> cnp.PyArray_DATA(out)
    for i in range(n):
        po[i] = f(a, pb[i])
    return out


# binary: array/array, array/scalar and (for the non-commutative ones)
# scalar/array variants

def add_aa(cnp.ndarray a, cnp.ndarray b):
    return _map2(_add, a, b)

def add_as(cnp.ndarray a, double b):
    return _map2s(_add, a, b)

def sub_aa(cnp.ndarray a, cnp.ndarray b):
    return _map2(_sub, a, b)

def sub_as(cnp.ndarray a, double b):
    return _map2s(_sub, a, b)

def sub_sa(double a, cnp.ndarray b):
    return _map2r(_sub, a, b)

def mul_aa(cnp.ndarray a, cnp.ndarray b):
    return _map2(_mul, a, b)

def mul_as(cnp.ndarray a, double b):
    return _map2s(_mul, a, b)

def div_aa(cnp.ndarray a, cnp.ndarray b):
    return _map2(_div, a, b)

def div_as(cnp.ndarray a, double b):
    return _map2s(_div, a, b)

def div_sa(double a, cnp.ndarray b):
    return _map2r(_div, a, b)

def pow_aa(cnp.ndarray a, cnp.ndarray b):
    return _map2(pow, a, b)

def pow_as(cnp.ndarray a, double b):
    return _map2s(pow, a, b)

def pow_sa(double a, cnp.ndarray b):
    return _map2r(pow, a, b)

def atan2_aa(cnp.ndarray a, cnp.ndarray b):
    return _map2(atan2, a, b)

def atan2_as(cnp.ndarray a, double b):
    return _map2s(atan2, a, b)

def atan2_sa(double a, cnp.ndarray b):
    return _map2r(atan2, a, b)

def hypot_aa(cnp.ndarray a, cnp.ndarray b):
    return _map2(hypot, a, b)

def hypot_as(cnp.ndarray a, double b):
    return _map2s(hypot, a, b)

def min_aa(cnp.ndarray a, cnp.ndarray b):
    return _map2(fmin, a, b)

def min_as(cnp.ndarray a, double b):
    return _map2s(fmin, a, b)

def max_aa(cnp.ndarray a, cnp.ndarray b):
    return _map2(fmax, a, b)

def max_as(cnp.ndarray a, double b):
    return _map2s(fmax, a, b)


# unary

def neg_a(cnp.ndarray a):
    return _map1(_neg, a)

def abs_a(cnp.ndarray a):
    return _map1(fabs, a)

def sin_a(cnp.ndarray a):
    return _map1(sin, a)

def cos_a(cnp.ndarray a):
    return _map1(cos, a)

def tan_a(cnp.ndarray a):
    return _map1(tan, a)

def exp_a(cnp.ndarray a):
    return _map1(exp, a)

def log_a(cnp.ndarray a):
    return _map1(log, a)

def sqrt_a(cnp.ndarray a):
    return _map1(sqrt, a)

def asin_a(cnp.ndarray a):
    return _map1(asin, a)

def acos_a(cnp.ndarray a):
    return _map1(acos, a)

def atan_a(cnp.ndarray a):
    return _map1(atan, a)

def sinh_a(cnp.ndarray a):
    return _map1(sinh, a)

def cosh_a(cnp.ndarray a):
    return _map1(cosh, a)

def tanh_a(cnp.ndarray a):
    return _map1(tanh, a)

def floor_a(cnp.ndarray a):
    return _map1(floor, a)

def ceil_a(cnp.ndarray a):
    return _map1(ceil, a)


# scalar twins (same libm calls as the array kernels)

def sin_s(double x):
    return sin(x)

def cos_s(double x):
    return cos(x)

def tan_s(double x):
    return tan(x)

def exp_s(double x):
    return exp(x)

def log_s(double x):
    return log(x)

def sqrt_s(double x):
    return sqrt(x)

def abs_s(double x):
    return fabs(x)

def asin_s(double x):
    return asin(x)

def acos_s(double x):
    return acos(x)

def atan_s(double x):
    return atan(x)

def sinh_s(double x):
    return sinh(x)

def cosh_s(double x):
    return cosh(x)

def tanh_s(double x):
    return tanh(x)

def floor_s(double x):
    return floor(x)

def ceil_s(double x):
    return ceil(x)

def pow_s(double x, double y):
    return pow(x, y)

def atan2_s(double y, double x):
    return atan2(y, x)

def hypot_s(double x, double y):
    return hypot(x, y)

def min_s(double x, double y):
    return fmin(x, y)

def max_s(double x, double y):
    return fmax(x, y)
