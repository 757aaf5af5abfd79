# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics mirror fracvar._pykernels exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, tanh, isfinite

cnp.import_array()

cdef enum:
    DRIFT_ZERO = 0
    DRIFT_CONSTANT = 1
    DRIFT_SINE = 2
    DRIFT_TANH = 3
    DRIFT_LINEAR = 4


cdef inline double _drift(int kind, double param, double t, double x) noexcept nogil:
    if kind == DRIFT_CONSTANT:
        return param
    elif kind == DRIFT_SINE:
        return sin(x + t)
    elif kind == DRIFT_TANH:
        return tanh(param * x)
    elif kind == DRIFT_LINEAR:
        return -param * x
    return 0.0


def euler_registry(int kind, double param, double x0, double sigma, double dt,
                   const double[::1] noise, Py_ssize_t stride):
    """Euler scheme on the fine grid, returning every ``stride``-th state.

    Returns ``(values, bad_step)``; ``bad_step`` is -1 unless the drift turned
    non-finite, in which case it is the offending fine step index.
    """
    cdef Py_ssize_t n_fine = noise.shape[0]
    cdef Py_ssize_t n_out = n_fine // stride
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n_out + 1, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double x = x0, t, fx
    cdef Py_ssize_t k, bad = -1
    ov[0] = x0
    with nogil:
        for k in range(n_fine):
            t = k * dt
            fx = _drift(kind, param, t, x)
            if not isfinite(fx):
                bad = k
                break
            x = x + fx * dt + sigma * noise[k]
            if (k + 1) % stride == 0:
                ov[(k + 1) // stride] = x
    return out, bad

