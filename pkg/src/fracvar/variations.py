"""Quadratic a-variations, their normalization and the CLT variance constant."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from fracvar import _kernels
from fracvar.errors import DomainError, LengthError, ScopeError
from fracvar.filters import Filter, filter_covariance, filter_variance, order
from fracvar.path import Path

DEFAULT_TRUNCATION = 10**6
_CHUNK = 1 << 17


@dataclass(frozen=True)
class SamplingGrid:
    n: int
    delta: float
    alpha: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta!r}")
        if self.alpha is not None:
            if not self.alpha > 0:
                raise DomainError("alpha must be positive")
            if abs(self.delta - self.n ** (-self.alpha)) > 1e-12 * self.delta:
                raise DomainError(f"delta={self.delta} is not n^-alpha for n={self.n}, alpha={self.alpha}")

    @classmethod
    def from_alpha(cls, n: int, alpha: float) -> "SamplingGrid":
        return cls(n, float(n) ** (-alpha), alpha)


@dataclass(frozen=True)
class VariationReport:
    u: float
    v: float
    n_terms: int


def _values(path) -> np.ndarray:
    return path.values if isinstance(path, Path) else np.asarray(path, dtype=float)


def u_statistic(path, f: Filter) -> float:
    """``(1/n) sum_j (Delta_a Z_j)^2`` with ``n = len(path)``."""
    x = np.ascontiguousarray(_values(path), dtype=float)
    if x.ndim != 1 or x.size <= f.p:
        raise LengthError(f"path of length {x.size} is too short for filter {f}")
    return _kernels.filtered_square_sum(x, f.as_array()) / x.size


def v_statistic(path: Path, f: Filter, h: float) -> float:
    return variation_report(path, f, h).v


def variation_report(path: Path, f: Filter, h: float) -> VariationReport:
    u = u_statistic(path, f)
    n = len(path)
    sigma = filter_variance(f, path.delta, h)
    n_terms = n - f.p
    return VariationReport(u=u, v=u / sigma - n_terms / n, n_terms=n_terms)


def rho(f: Filter, h: float, lag):
    """Correlation of filtered fBm increments ``lag`` windows apart (mesh free)."""
    return filter_covariance(f, 1.0, h, lag) / filter_variance(f, 1.0, h)


def _check_clt_scope(f: Filter, h: float) -> int:
    m = order(f)
    if not m > h + 0.25:
        raise ScopeError(
            f"CLT constant undefined: filter order M(a)={m} must exceed H + 1/4 = {h + 0.25:g}")
    return m


@lru_cache(maxsize=128)
def _rho_square_sum(coeffs: tuple[float, ...], h: float, truncation: int) -> float:
    f = Filter(coeffs)
    var = filter_variance(f, 1.0, h)
    total = 0.0
    # small-to-large chunks; the summands decrease so the error stays at rounding level
    for start in range(1, truncation + 1, _CHUNK):
        lags = np.arange(start, min(start + _CHUNK, truncation + 1), dtype=float)
        r = filter_covariance(f, 1.0, h, lags) / var
        total += math.fsum(r * r)
    return total


def asymptotic_variance(f: Filter, h: float, truncation: int = DEFAULT_TRUNCATION) -> float:
    """Truncated ``sigma_H = 2 sum_{r in Z} rho(r)^2`` for ``sqrt(n) V``.

    Requires ``M(a) > H + 1/4``; the omitted tail is given by
    :func:`asymptotic_variance_tail`.
    """
    _check_clt_scope(f, h)
    if int(truncation) != truncation or truncation < 1:
        raise DomainError("truncation must be a positive integer")
    return 2.0 * (1.0 + 2.0 * _rho_square_sum(f.coeffs, float(h), int(truncation)))


def asymptotic_variance_tail(f: Filter, h: float, truncation: int = DEFAULT_TRUNCATION) -> float:
    """Estimate of the mass ``4 sum_{r > truncation} rho(r)^2`` left out by truncation.

    Uses the leading decay ``rho(r) ~ C r^{2H - 2M}`` fitted at the cut-off.
    """
    m = _check_clt_scope(f, h)
    t = float(truncation)
    r_t = rho(f, h, truncation)
    expo = 4.0 * m - 4.0 * h  # rho^2 ~ r^{-expo}, expo > 1 in scope
    # int_T^inf (rho(T) (r/T)^{(2H-2M)})^2 dr
    return 4.0 * r_t * r_t * t / (expo - 1.0)


@dataclass(frozen=True)
class Constraint:
    name: str
    satisfied: bool


@dataclass(frozen=True)
class MeshVerdict:
    clt_applies: bool
    binding_constraints: tuple[Constraint, ...]

    @property
    def violated(self) -> list[str]:
        return [c.name for c in self.binding_constraints if not c.satisfied]

    def to_dict(self) -> dict:
        return {
            "clt_applies": self.clt_applies,
            "constraints": [{"name": c.name, "satisfied": c.satisfied} for c in self.binding_constraints],
        }


def mesh_admissible(h: float, alpha: float, m_order: int) -> MeshVerdict:
    """Whether the SDE variation CLT holds for ``Delta = n^-alpha``.

    Rough regime (H < 1/2): ``alpha > 1/(2(1-H))``. Smooth regime (H >= 1/2):
    ``alpha >= 1``, ``alpha > max((2H-1)/(2-2H), 1/(4-4H))`` and ``M(a) > H + 1/4``.
    """
    if not 0.0 < h < 1.0:
        raise DomainError(f"Hurst index must lie in the open interval (0, 1), got {h!r}")
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if h < 0.5:
        bound = 1.0 / (2.0 * (1.0 - h))
        cons = [Constraint(f"alpha > 1/(2(1-H)) = {bound:.6g}", alpha > bound)]
    else:
        b1 = (2.0 * h - 1.0) / (2.0 - 2.0 * h)
        b2 = 1.0 / (4.0 - 4.0 * h)
        cons = [
            Constraint("alpha >= 1", alpha >= 1.0),
            Constraint(f"alpha > (2H-1)/(2-2H) = {b1:.6g}", alpha > b1),
            Constraint(f"alpha > 1/(4-4H) = {b2:.6g}", alpha > b2),
            Constraint(f"M(a) > H + 1/4 = {h + 0.25:.6g}", m_order > h + 0.25),
        ]
    return MeshVerdict(all(c.satisfied for c in cons), tuple(cons))
