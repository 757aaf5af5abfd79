"""Zero-sum filters and the exact second-order structure of fBm filtered increments.

A filter ``a = (a_0, ..., a_p)`` with ``sum(a) == 0`` turns a sampled process
into the higher-order increments ``Delta_a X_j = sum_i a_i X_{(i+j) Delta}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from fracvar.errors import DomainError, LengthError, MalformedFilterError, NumericalError

ZERO_SUM_TOL = 1e-12
MOMENT_TOL = 1e-10

# lags at or beyond SERIES_FACTOR * p use the binomial expansion of |r + d|^{2H}
SERIES_FACTOR = 2
SERIES_TERMS = 40


@dataclass(frozen=True)
class Filter:
    """Immutable zero-sum coefficient vector ``(a_0, ..., a_p)``, ``p >= 1``."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        values = tuple(float(c) for c in coeffs)
        if len(values) < 2:
            raise MalformedFilterError(f"a filter needs at least 2 coefficients, got {len(values)}")
        if not all(np.isfinite(values)):
            raise MalformedFilterError(f"non-finite filter coefficient in {values}")
        scale = max(1.0, sum(abs(c) for c in values))
        if abs(sum(values)) > ZERO_SUM_TOL * scale:
            raise MalformedFilterError(f"filter coefficients must sum to zero, got sum={sum(values)!r}")
        if all(c == 0.0 for c in values):
            raise MalformedFilterError("filter coefficients are all zero")
        object.__setattr__(self, "coeffs", values)

    @classmethod
    def parse(cls, text: str) -> "Filter":
        """Parse a comma separated coefficient list such as ``"1,-2,1"``."""
        try:
            parts = [float(tok) for tok in text.replace(" ", "").split(",") if tok]
        except ValueError as exc:
            raise MalformedFilterError(f"cannot parse filter {text!r}: {exc}") from None
        return cls(parts)

    @property
    def p(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    def __str__(self) -> str:
        return ",".join(f"{c:g}" for c in self.coeffs)


@dataclass(frozen=True)
class FilterProfile:
    order: int
    partial_sums: tuple[float, ...]


def order(f: Filter) -> int:
    """Index ``M`` of the first non-vanishing moment ``sum_i a_i i^M`` (``0^0 = 1``)."""
    a = f.as_array()
    idx = np.arange(len(a), dtype=float)
    for k in range(1, len(a)):
        powers = idx**k
        moment = float(np.dot(a, powers))
        scale = max(1.0, float(np.dot(np.abs(a), powers)))
        if abs(moment) > MOMENT_TOL * scale:
            return k
    raise MalformedFilterError(f"all moments of {f} vanish up to its length")


def partial_sums(f: Filter) -> np.ndarray:
    """Cumulative sums ``b_i = a_0 + ... + a_i``; the last entry is zeroed."""
    b = np.cumsum(f.as_array())
    b[-1] = 0.0
    return b


def profile(f: Filter) -> FilterProfile:
    return FilterProfile(order=order(f), partial_sums=tuple(partial_sums(f)))


def thin(f: Filter) -> Filter:
    """Dilate ``f`` by inserting a zero between consecutive coefficients."""
    out = np.zeros(2 * f.p + 1)
    out[::2] = f.coeffs
    return Filter(out)


def filtered_increments(values: Sequence[float] | np.ndarray, f: Filter) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise LengthError(f"expected a 1-d sample, got shape {x.shape}")
    if x.size < len(f):
        raise LengthError(f"need at least {len(f)} values for filter {f}, got {x.size}")
    return np.correlate(x, f.as_array(), mode="valid")


def lag_products(f: Filter) -> np.ndarray:
    """Autocorrelation ``c_d = sum_k a_k a_{k+d}`` for ``d = 0..p``."""
    a = f.as_array()
    return np.array([np.dot(a[: len(a) - d], a[d:]) for d in range(len(a))])


def _check_h(h: float) -> None:
    if not 0.0 < h < 1.0:
        raise DomainError(f"Hurst index must lie in the open interval (0, 1), got {h!r}")


def _check_delta(delta: float) -> None:
    if not delta > 0.0 or not np.isfinite(delta):
        raise DomainError(f"mesh delta must be a positive finite number, got {delta!r}")


@lru_cache(maxsize=64)
def _series_coefficients(coeffs: tuple[float, ...], h: float, m_order: int) -> np.ndarray:
    # coefficient of r^{2H - m} in sum_d c_{|d|} |r + d|^{2H} for r > p;
    # moments of the lag products vanish below 2M, odd ones vanish by symmetry
    f = Filter(coeffs)
    c = lag_products(f)
    d = np.arange(-f.p, f.p + 1, dtype=float)
    cd = np.concatenate([c[:0:-1], c])
    ms = np.arange(2 * m_order, 2 * m_order + 2 * SERIES_TERMS, 2)
    out = np.empty(ms.size)
    for i, m in enumerate(ms):
        binom = 1.0
        for j in range(m):
            binom *= (2.0 * h - j) / (j + 1)
        out[i] = binom * float(np.dot(cd, d**m))
    return out


def _lagged_power_sum(f: Filter, h: float, lags: np.ndarray) -> np.ndarray:
    """``sum_{k,l} a_k a_l |r + k - l|^{2H}`` for each lag ``r``, evaluated stably."""
    r = np.abs(np.asarray(lags, dtype=float))
    c = lag_products(f)
    out = np.empty(r.shape)
    near = r < SERIES_FACTOR * f.p
    if np.any(near):
        rn = r[near][:, None]
        d = np.arange(1, f.p + 1, dtype=float)[None, :]
        two_h = 2.0 * h
        terms = np.abs(rn + d) ** two_h + np.abs(rn - d) ** two_h
        out[near] = c[0] * rn[:, 0] ** two_h + terms @ c[1:]
    far = ~near
    if np.any(far):
        m_order = order(f)
        coef = _series_coefficients(f.coeffs, float(h), m_order)
        rf = r[far]
        ms = np.arange(2 * m_order, 2 * m_order + 2 * SERIES_TERMS, 2)
        # Horner in r^-2; successive terms shrink by at least SERIES_FACTOR^-2
        inv = 1.0 / rf
        acc = np.zeros_like(rf)
        for k in range(ms.size - 1, -1, -1):
            acc = acc * inv * inv + coef[k]
        out[far] = rf ** (2.0 * h - ms[0]) * acc
    return out


def filter_covariance(f: Filter, delta: float, h: float, lag: int | np.ndarray) -> float | np.ndarray:
    """Covariance of two fBm increments over ``f`` whose windows start ``lag`` steps apart."""
    _check_h(h)
    _check_delta(delta)
    lags = np.asarray(lag)
    vals = -0.5 * delta ** (2.0 * h) * _lagged_power_sum(f, h, np.atleast_1d(lags))
    if lags.ndim == 0:
        return float(vals[0])
    return vals.reshape(lags.shape)


def filter_variance(f: Filter, delta: float, h: float) -> float:
    """``sigma_{a,Delta} = Var(Delta_a B^H_j)``."""
    v = filter_covariance(f, delta, h, 0)
    if not v > 0.0:
        raise NumericalError(f"non-positive filter variance {v!r} for {f}, H={h}")
    return v
