"""Hurst index estimators built on the raw quadratic variation U.

None of the estimators reads the mesh of the path except ``h1_estimator``,
which takes it as an explicit argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from fracvar.errors import DegenerateDataError, FamilyDesignError, LengthError
from fracvar.filters import Filter, thin
from fracvar.path import Path
from fracvar.variations import u_statistic

ESTIMATOR_KINDS = ("standard", "ratio", "regression_h1", "regression_h2")
RANK_RTOL = 1e-10

INCREMENT = Filter((-1.0, 1.0))
SECOND_DIFF = Filter((1.0, -2.0, 1.0))


@dataclass
class HurstEstimate:
    value: float
    estimator_kind: str
    u_values: list[float] = field(default_factory=list)
    d_hat: list[float] | None = None
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DegenerateDataError(f"{self.estimator_kind} estimate is not finite")
        if not 0.0 < self.value < 1.0:
            self.warnings.append(f"estimate {self.value:.6g} lies outside (0, 1)")

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator_kind,
            "value": self.value,
            "warnings": list(self.warnings),
            "diagnostics": {"u_values": list(self.u_values), "d_hat": self.d_hat},
        }


def _positive_u(path, f: Filter) -> float:
    u = u_statistic(path, f)
    if not u > 0.0:
        raise DegenerateDataError(f"degenerate data: quadratic variation over filter {f} is zero")
    return u


def standard_estimator(path: Path) -> HurstEstimate:
    """``log(n U) / (-2 log n) + 1/2`` with the increment filter; assumes mesh ``1/n``."""
    n = len(path)
    if n < 3:
        raise LengthError("standard estimator needs at least 3 observations")
    u = _positive_u(path, INCREMENT)
    value = math.log(n * u) / (-2.0 * math.log(n)) + 0.5
    return HurstEstimate(value, "standard", [u])


def ratio_estimator(path: Path, base: Filter = INCREMENT) -> HurstEstimate:
    """``(1/2) log2(U(thin(base)) / U(base))``.

    Independent of the mesh and of multiplicative scaling of the path.
    """
    thinned = thin(base)
    if len(path) <= thinned.p:
        raise LengthError(f"path of length {len(path)} too short for thinned filter {thinned}")
    u1 = _positive_u(path, base)
    u2 = _positive_u(path, thinned)
    return HurstEstimate(0.5 * math.log2(u2 / u1), "ratio", [u1, u2])


@dataclass(frozen=True)
class RegressionDesign:
    a_matrix: np.ndarray


@dataclass(frozen=True)
class FilterFamily:
    """Filters ``a^(1..m)``; lag-variance regression over ``d = 1..P``, ``P = max p_i``."""

    filters: tuple[Filter, ...]

    def __init__(self, filters):
        fs = tuple(f if isinstance(f, Filter) else Filter(f) for f in filters)
        if not fs:
            raise FamilyDesignError("a filter family needs at least one filter")
        object.__setattr__(self, "filters", fs)

    @classmethod
    def thinned(cls, base: Filter) -> "FilterFamily":
        return cls((base, thin(base)))

    @property
    def p_max(self) -> int:
        return max(f.p for f in self.filters)

    @cached_property
    def design(self) -> np.ndarray:
        a = design_matrix(self)
        a.setflags(write=False)
        return a

    @cached_property
    def rank(self) -> int:
        s = np.linalg.svd(self.design, compute_uv=False)
        return int(np.sum(s > RANK_RTOL * s.max()))

    @property
    def full_rank(self) -> bool:
        return self.rank == self.p_max


def design_matrix(family: FilterFamily) -> np.ndarray:
    """``A[i, d-1] = -sum_k a^(i)_k a^(i)_{k+d}`` for ``d <= p_i``, zero beyond."""
    out = np.zeros((len(family.filters), family.p_max))
    for i, f in enumerate(family.filters):
        a = f.as_array()
        for d in range(1, f.p + 1):
            out[i, d - 1] = -float(np.dot(a[: a.size - d], a[d:]))
    return out


def build_design_matrix(family: FilterFamily) -> RegressionDesign:
    if not family.full_rank:
        raise FamilyDesignError(
            f"design matrix has rank {family.rank} < P={family.p_max}; the family cannot identify D")
    return RegressionDesign(np.array(family.design))


def _u_vector(family: FilterFamily, path) -> np.ndarray:
    n = len(path)
    if n <= family.p_max:
        raise LengthError(f"path of length {n} too short for filters of length {family.p_max + 1}")
    return np.array([u_statistic(path, f) for f in family.filters])


def solve_d(family: FilterFamily, u_n) -> np.ndarray:
    """Least-squares ``D`` with ``A D ~ u_n`` (SVD based)."""
    design = build_design_matrix(family).a_matrix
    d_hat, *_ = np.linalg.lstsq(design, np.asarray(u_n, dtype=float), rcond=RANK_RTOL)
    return d_hat


def estimate_d(family: FilterFamily, path) -> np.ndarray:
    return solve_d(family, _u_vector(family, path))


def _log_abs_d(d_hat: np.ndarray, warnings: list[str]) -> np.ndarray:
    if np.any(d_hat == 0.0):
        raise DegenerateDataError("degenerate data: a regressed lag variance is exactly zero")
    neg = np.flatnonzero(d_hat < 0)
    if neg.size:
        warnings.append(f"negative lag variance estimates at d={[int(i) + 1 for i in neg]}; using |D|")
    return np.log(np.abs(d_hat))


def h1_from_d(d_hat, delta: float, warnings: list[str] | None = None) -> float:
    """Regression through the origin of ``log|D_d|`` on ``log(d delta)``, halved."""
    warnings = [] if warnings is None else warnings
    d_hat = np.asarray(d_hat, dtype=float)
    x = np.log(np.arange(1, d_hat.size + 1) * delta)
    denom = 2.0 * float(np.dot(x, x))
    if denom == 0.0:
        raise FamilyDesignError("all log(d * delta) vanish (P = 1 and delta = 1); H1 is undefined")
    return float(np.dot(_log_abs_d(d_hat, warnings), x)) / denom


def h2_from_d(d_hat, warnings: list[str] | None = None) -> float:
    """Slope of ``log|D_d|`` on ``log d`` with intercept, halved; the mesh drops out."""
    warnings = [] if warnings is None else warnings
    d_hat = np.asarray(d_hat, dtype=float)
    p = d_hat.size
    if p < 2:
        raise FamilyDesignError("H2 needs P >= 2 lags")
    y = _log_abs_d(d_hat, warnings)
    x = np.log(np.arange(1, p + 1, dtype=float))
    num = float(np.dot(y, x)) - y.sum() * x.sum() / p
    den = 2.0 * (float(np.dot(x, x)) - x.sum() ** 2 / p)
    return num / den


def h1_estimator(family: FilterFamily, path, delta: float) -> HurstEstimate:
    u_n = _u_vector(family, path)
    d_hat = solve_d(family, u_n)
    warnings: list[str] = []
    value = h1_from_d(d_hat, delta, warnings)
    return HurstEstimate(value, "regression_h1", u_n.tolist(), d_hat.tolist(), warnings)


def h2_estimator(family: FilterFamily, path) -> HurstEstimate:
    if family.p_max < 2:
        raise FamilyDesignError("H2 needs P >= 2 lags")
    u_n = _u_vector(family, path)
    d_hat = solve_d(family, u_n)
    warnings: list[str] = []
    value = h2_from_d(d_hat, warnings)
    return HurstEstimate(value, "regression_h2", u_n.tolist(), d_hat.tolist(), warnings)


def builtin_families() -> dict[str, FilterFamily]:
    """Base filter plus its thinning, for the increment and second-difference filters."""
    return {
        "order1": FilterFamily.thinned(INCREMENT),
        "order2": FilterFamily.thinned(SECOND_DIFF),
    }


def estimate(path: Path, kind: str, base: Filter = INCREMENT, delta: float | None = None) -> HurstEstimate:
    """Dispatch by estimator name; regression families are ``{base, thin(base)}``."""
    if kind == "standard":
        return standard_estimator(path)
    if kind == "ratio":
        return ratio_estimator(path, base)
    family = FilterFamily.thinned(base)
    if kind == "regression_h1":
        return h1_estimator(family, path, path.delta if delta is None else delta)
    if kind == "regression_h2":
        return h2_estimator(family, path)
    raise ValueError(f"unknown estimator {kind!r}; choose from {', '.join(ESTIMATOR_KINDS)}")
