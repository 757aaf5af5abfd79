"""Seeded Monte Carlo studies: estimator MSE tables and CLT moment checks."""
from __future__ import annotations

import dataclasses
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from fracvar.errors import FracvarError, SettingError
from fracvar.estimators import ESTIMATOR_KINDS, INCREMENT, SECOND_DIFF, estimate
from fracvar.fbm import FbmSpec, sample_fgn
from fracvar.filters import Filter, order
from fracvar.path import Path, cumulate, fmt17
from fracvar.rng import make_rng
from fracvar.sde import DriftSpec, SdeSpec, default_oversample, simulate_euler
from fracvar.variations import asymptotic_variance, mesh_admissible, variation_report

log = logging.getLogger(__name__)

DEFAULT_N_LIST = (1000, 2000, 4000, 8000)
DEFAULT_REPS = 100

# target MSE per (setting, n) for the built-in studies
REFERENCE_MSE = {
    "Study-S1": (2.23e-5, 9.27e-6, 4.31e-6, 1.82e-6),
    "Study-S2": (0.00051, 0.00027, 0.00014, 7.67e-5),
    "Study-S3": (0.0004, 0.0002, 0.00011, 4.8e-5),
    "Study-S4": (0.0005, 0.00025, 0.00012, 5.95e-5),
    "Study-S5": (0.004, 0.003, 0.003, 0.0025),
    "Study-S6": (0.001, 0.00074, 0.00034, 0.00014),
    "Study-S7": (0.00085, 0.00054, 0.00025, 0.00015),
}


@dataclass(frozen=True)
class StudySetting:
    label: str
    h_true: float
    interval_end: float
    estimator_kind: str
    base_filter: Filter = INCREMENT
    sigma: float = 1.0
    drift: DriftSpec = DriftSpec("sine")
    n_list: tuple[int, ...] = DEFAULT_N_LIST
    reps: int = DEFAULT_REPS
    seed: int = 0
    oversample: int | None = None

    def __post_init__(self):
        if self.estimator_kind not in ESTIMATOR_KINDS:
            raise SettingError(f"unknown estimator {self.estimator_kind!r}")
        ns = tuple(int(n) for n in self.n_list)
        if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
            raise SettingError(f"n_list must be non-empty and strictly increasing, got {ns}")
        object.__setattr__(self, "n_list", ns)
        if self.reps < 2:
            raise SettingError("reps must be >= 2")
        if not 0.0 < self.h_true < 1.0:
            raise SettingError("h_true must lie in (0, 1)")
        if not (self.interval_end > 0 and self.sigma > 0):
            raise SettingError("interval_end and sigma must be positive")
        if not 0 <= self.seed < 2**64:
            raise SettingError("seed must be a 64-bit unsigned integer")

    @property
    def effective_oversample(self) -> int:
        return default_oversample(self.h_true) if self.oversample is None else self.oversample

    def sde(self) -> SdeSpec:
        return SdeSpec(0.0, self.drift, self.sigma, self.interval_end, self.h_true)

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "h_true": self.h_true,
            "interval_end": self.interval_end,
            "estimator_kind": self.estimator_kind,
            "base_filter": list(self.base_filter.coeffs),
            "sigma": self.sigma,
            "drift": {"kind": self.drift.kind, "param": self.drift.param, "bound_m": self.drift.bound_m,
                      "unbounded_ok": self.drift.unbounded_ok},
            "n_list": list(self.n_list),
            "reps": self.reps,
            "seed": self.seed,
            "oversample": self.oversample,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "StudySetting":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise SettingError(f"unknown setting fields: {', '.join(unknown)}")
        kw = dict(doc)
        try:
            if "base_filter" in kw:
                bf = kw["base_filter"]
                kw["base_filter"] = Filter.parse(bf) if isinstance(bf, str) else Filter(bf)
            if "drift" in kw:
                dr = kw["drift"]
                if isinstance(dr, str):
                    kw["drift"] = DriftSpec.parse(dr)
                else:
                    extra = set(dr) - {"kind", "param", "bound_m", "unbounded_ok"}
                    if extra:
                        raise SettingError(f"unknown drift fields: {', '.join(sorted(extra))}")
                    kw["drift"] = DriftSpec(**dr)
            if "n_list" in kw:
                kw["n_list"] = tuple(kw["n_list"])
            return cls(**kw)
        except TypeError as exc:
            raise SettingError(f"bad setting document: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "StudySetting":
        try:
            doc = json.loads(text)
        except ValueError as exc:
            raise SettingError(f"setting is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise SettingError("setting JSON must be an object")
        return cls.from_dict(doc)


def builtin_settings() -> list[StudySetting]:
    """The seven sine-drift studies: (H, interval, estimator, filter, sigma)."""
    rows = [
        ("Study-S1", 0.7, 1.0, "standard", INCREMENT, 1.0),
        ("Study-S2", 0.7, 1.0, "ratio", INCREMENT, 1.0),
        ("Study-S3", 0.7, 1.0, "ratio", INCREMENT, 5.0),
        ("Study-S4", 0.7, 10.0, "ratio", INCREMENT, 1.0),
        ("Study-S5", 0.98, 1.0, "standard", INCREMENT, 1.0),
        ("Study-S6", 0.98, 1.0, "ratio", SECOND_DIFF, 1.0),
        ("Study-S7", 0.98, 10.0, "ratio", SECOND_DIFF, 1.0),
    ]
    return [StudySetting(label, h, end, kind, filt, sigma) for label, h, end, kind, filt, sigma in rows]


def builtin_setting(label: str) -> StudySetting:
    for s in builtin_settings():
        if s.label == label:
            return s
    raise KeyError(label)


@dataclass
class CellStats:
    n: int
    mse: float
    bias: float
    variance: float
    failures: int
    estimates: list[float] = field(default_factory=list, repr=False)

    def to_dict(self, with_reps: bool = False) -> dict[str, Any]:
        d = {"n": self.n, "mse": self.mse, "bias": self.bias, "variance": self.variance,
             "failures": self.failures}
        if with_reps:
            d["estimates"] = list(self.estimates)
        return d


@dataclass
class McReport:
    setting: StudySetting
    per_n: list[CellStats]
    wall_seconds: float
    oversample: int
    variance_convention: str = "sample (ddof=1); mse = bias^2 + variance*(k-1)/k"

    def cell(self, n: int) -> CellStats:
        for c in self.per_n:
            if c.n == n:
                return c
        raise KeyError(n)

    def to_dict(self, with_reps: bool = False) -> dict[str, Any]:
        return {
            "setting": self.setting.to_dict(),
            "oversample": self.oversample,
            "variance_convention": self.variance_convention,
            "per_n": [c.to_dict(with_reps) for c in self.per_n],
            "wall_seconds": self.wall_seconds,
        }

    def to_json(self, with_reps: bool = False) -> str:
        return json.dumps(self.to_dict(with_reps), indent=1)

    def to_csv(self) -> str:
        lines = ["setting,n,mse,bias,variance,failures"]
        for c in self.per_n:
            lines.append(",".join([self.setting.label, str(c.n), fmt17(c.mse), fmt17(c.bias),
                                   fmt17(c.variance), str(c.failures)]))
        return "\n".join(lines) + "\n"

    def reps_csv(self) -> str:
        lines = ["setting,n,rep,estimate"]
        for c in self.per_n:
            for r, est in enumerate(c.estimates):
                lines.append(f"{self.setting.label},{c.n},{r},{fmt17(est)}")
        return "\n".join(lines) + "\n"

    def table(self) -> str:
        """Plain-text per-n MSE table (one row per sample size)."""
        head = f"{'n':>6} | {self.setting.label:>12} | {'bias':>11} | {'failures':>8}"
        rows = [head, "-" * len(head)]
        for c in self.per_n:
            rows.append(f"{c.n:>6} | {c.mse:>12.4g} | {c.bias:>11.3g} | {c.failures:>8d}")
        return "\n".join(rows)


def replicate(setting: StudySetting, n: int, r: int) -> float:
    """One replication: simulate ``n`` observations, return the estimate."""
    rng = make_rng(setting.seed, setting.label, n, r)
    spec = setting.sde()
    path = simulate_euler(spec, n, setting.effective_oversample, setting.seed, rng=rng)
    # n observations at t = delta, ..., n delta
    obs = Path(path.delta, path.values[1:])
    return estimate(obs, setting.estimator_kind, setting.base_filter, path.delta).value


def _replicate_job(args) -> tuple[int, float | None, str | None]:
    setting, n, r = args
    try:
        return r, replicate(setting, n, r), None
    except FracvarError as exc:
        return r, None, str(exc)


def aggregate(estimates: list[float], h_true: float, n: int, failures: int) -> CellStats:
    errs = [e - h_true for e in estimates]
    k = len(errs)
    bias = math.fsum(errs) / k
    mse = math.fsum(e * e for e in errs) / k
    var = math.fsum((e - bias) ** 2 for e in errs) / (k - 1) if k > 1 else 0.0
    return CellStats(n, mse, bias, var, failures, list(estimates))


def run_setting(setting: StudySetting, parallelism: int = 1) -> McReport:
    """Run every (n, replication) job; results do not depend on ``parallelism``."""
    t0 = time.perf_counter()
    cells = []
    pool = ProcessPoolExecutor(parallelism) if parallelism > 1 else None
    try:
        for n in setting.n_list:
            jobs = [(setting, n, r) for r in range(setting.reps)]
            results = list(pool.map(_replicate_job, jobs, chunksize=4)) if pool else [
                _replicate_job(j) for j in jobs]
            results.sort(key=lambda item: item[0])
            ok = [v for _, v, _ in results if v is not None]
            failed = [msg for _, v, msg in results if v is None]
            for msg in failed[:3]:
                log.warning("%s n=%d replication failed: %s", setting.label, n, msg)
            if not ok:
                raise SettingError(f"{setting.label}: all {setting.reps} replications failed at n={n}")
            cells.append(aggregate(ok, setting.h_true, n, len(failed)))
    finally:
        if pool:
            pool.shutdown()
    return McReport(setting, cells, time.perf_counter() - t0, setting.effective_oversample)


@dataclass
class CltReport:
    filter: Filter
    h: float
    alpha: float
    n: int
    reps: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    asymptotic_variance: float | None
    variance_ratio: float | None
    mesh: dict
    samples: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict[str, Any]:
        return {
            "filter": list(self.filter.coeffs), "h": self.h, "alpha": self.alpha, "n": self.n,
            "reps": self.reps, "mean": self.mean, "variance": self.variance,
            "skewness": self.skewness, "excess_kurtosis": self.excess_kurtosis,
            "asymptotic_variance": self.asymptotic_variance, "variance_ratio": self.variance_ratio,
            "mesh_admissible": self.mesh,
        }


def moments(x: np.ndarray) -> tuple[float, float, float, float]:
    """Mean, sample variance, skewness and excess kurtosis (moment estimators)."""
    x = np.asarray(x, dtype=float)
    mu = float(x.mean())
    c = x - mu
    m2 = float(np.mean(c**2))
    m3 = float(np.mean(c**3))
    m4 = float(np.mean(c**4))
    return mu, float(c @ c) / (x.size - 1), m3 / m2**1.5, m4 / m2**2 - 3.0


def clt_study(f: Filter, h: float, alpha: float, n: int, reps: int, seed: int = 0,
              *, sde: SdeSpec | None = None, min_reps: int = 500) -> CltReport:
    """Sample ``sqrt(n) V(a, n, n^-alpha, Z)`` over independent paths.

    ``Z`` is pure fBm unless ``sde`` is given, in which case the SDE is
    simulated over ``[0, n * n^-alpha]`` with ``n`` steps.
    """
    if reps < min_reps:
        raise SettingError(f"CLT study needs at least {min_reps} replications")
    delta = float(n) ** (-alpha)
    stats = np.empty(reps)
    for r in range(reps):
        rng = make_rng(seed, "clt", str(f), h, n, r)
        if sde is None:
            inc = sample_fgn(FbmSpec(h, n + 1, delta, seed), rng=rng)
            obs = Path(delta, cumulate(inc)[1:])
        else:
            spec = dataclasses.replace(sde, h=h, horizon=n * delta)
            x = simulate_euler(spec, n, None, seed, rng=rng)
            obs = Path(delta, x.values[1:])
        stats[r] = math.sqrt(n) * variation_report(obs, f, h).v
    mu, var, skew, kurt = moments(stats)
    try:
        sigma_h = asymptotic_variance(f, h)
    except FracvarError:
        sigma_h = None
    return CltReport(f, h, alpha, n, reps, mu, var, skew, kurt, sigma_h,
                     None if sigma_h is None else var / sigma_h,
                     mesh_admissible(h, alpha, order(f)).to_dict(), stats)
