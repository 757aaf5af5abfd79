"""Pure-Python fallbacks for the compiled kernels in ``_ckernels.pyx``."""
from __future__ import annotations

import math

import numpy as np

DRIFT_ZERO, DRIFT_CONSTANT, DRIFT_SINE, DRIFT_TANH, DRIFT_LINEAR = 0, 1, 2, 3, 4


def _registry_drift(kind: int, param: float):
    if kind == DRIFT_CONSTANT:
        return lambda t, x: param
    if kind == DRIFT_SINE:
        return lambda t, x: math.sin(x + t)
    if kind == DRIFT_TANH:
        return lambda t, x: math.tanh(param * x)
    if kind == DRIFT_LINEAR:
        return lambda t, x: -param * x
    return lambda t, x: 0.0


def euler_callable(func, x0: float, sigma: float, dt: float, noise: np.ndarray, stride: int):
    n_fine = len(noise)
    out = np.empty(n_fine // stride + 1)
    out[0] = x0
    x = float(x0)
    for k, dn in enumerate(noise.tolist()):
        t = k * dt
        fx = func(t, x)
        if not math.isfinite(fx):
            return out, k
        x = x + fx * dt + sigma * dn
        if (k + 1) % stride == 0:
            out[(k + 1) // stride] = x
    return out, -1


def euler_registry(kind: int, param: float, x0: float, sigma: float, dt: float,
                   noise: np.ndarray, stride: int):
    if kind == DRIFT_ZERO:
        # f == 0: the loop reduces to a sequential prefix sum, same rounding order
        out = np.empty(len(noise) // stride + 1)
        out[0] = x0
        full = np.cumsum(np.concatenate([[x0], sigma * np.asarray(noise, dtype=float)]))
        out[1:] = full[stride::stride]
        return out, -1
    return euler_callable(_registry_drift(kind, param), x0, sigma, dt, noise, stride)


def filtered_square_sum(values: np.ndarray, coeffs: np.ndarray) -> float:
    if len(values) < len(coeffs):
        raise ValueError("values shorter than filter")
    inc = np.correlate(values, coeffs, mode="valid")
    return float(np.dot(inc, inc))
