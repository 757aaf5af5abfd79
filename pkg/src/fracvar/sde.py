"""Euler simulation of ``X_t = x0 + int_0^t f(s, X_s) ds + sigma B^H_t``.

Noise enters additively, so driving the scheme with exact fBm increments
leaves the O(step) drift quadrature as the only discretization error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from fracvar import _kernels
from fracvar.errors import DomainError, NumericalError, ShapeError
from fracvar.fbm import FbmSpec, sample_fgn
from fracvar.path import Path, cumulate
from fracvar.rng import make_rng

DriftFunc = Callable[[float, float], float]


@dataclass(frozen=True)
class _RegisteredDrift:
    func: DriftFunc
    # minimal admissible M for parameter value c: ||f||_inf + ||df/dx||_inf <= M
    min_bound: Callable[[float], float]
    kernel_code: int | None = None


_REGISTRY: dict[str, _RegisteredDrift] = {
    "zero": _RegisteredDrift(lambda t, x, c=0.0: 0.0, lambda c: 0.0, _kernels._pykernels.DRIFT_ZERO),
    "constant": _RegisteredDrift(lambda t, x, c=0.0: c, lambda c: abs(c), _kernels._pykernels.DRIFT_CONSTANT),
    "sine": _RegisteredDrift(lambda t, x, c=0.0: math.sin(x + t), lambda c: 2.0, _kernels._pykernels.DRIFT_SINE),
    "scaled-tanh": _RegisteredDrift(lambda t, x, c=1.0: math.tanh(c * x), lambda c: 1.0 + abs(c),
                                    _kernels._pykernels.DRIFT_TANH),
    # mean reversion -c x: unbounded, so outside the estimators' guarantees (opt-in only)
    "linear": _RegisteredDrift(lambda t, x, c=1.0: -c * x, lambda c: math.inf,
                               _kernels._pykernels.DRIFT_LINEAR),
}


def register_drift(name: str, func: DriftFunc, bound: float) -> None:
    """Register a pure drift ``func(t, x) -> float`` with ``||f|| + ||f'|| <= bound``.

    Custom drifts always run through the pure-Python Euler loop.
    """
    if name in _REGISTRY:
        raise DomainError(f"drift {name!r} is already registered")
    if not bound > 0:
        raise DomainError("drift bound must be positive")
    _REGISTRY[name] = _RegisteredDrift(lambda t, x, c=0.0: func(t, x), lambda c: float(bound))


def drift_kinds() -> list[str]:
    return sorted(_REGISTRY)


@dataclass(frozen=True)
class DriftSpec:
    """Drift choice. Unbounded drifts (``linear``) need ``unbounded_ok=True``."""

    kind: str = "zero"
    param: float = 0.0
    bound_m: float | None = None
    unbounded_ok: bool = False

    def __post_init__(self):
        if self.kind not in _REGISTRY:
            raise DomainError(f"unknown drift {self.kind!r}; known: {', '.join(drift_kinds())}")
        need = _REGISTRY[self.kind].min_bound(self.param)
        if math.isinf(need):
            if not self.unbounded_ok:
                raise DomainError(
                    f"drift {self.kind}({self.param:g}) is unbounded; the estimators are only "
                    "justified for bounded drifts (opt in with unbounded_ok / --allow-unbounded-drift)")
            if self.bound_m is not None:
                raise DomainError(f"drift {self.kind}({self.param:g}) admits no finite bound M")
            return
        if self.bound_m is None:
            object.__setattr__(self, "bound_m", max(need, 1.0) if need == 0.0 else need)
        elif not self.bound_m > 0 or self.bound_m < need:
            raise DomainError(
                f"bound M={self.bound_m} too small for drift {self.kind}({self.param}); need >= {need}")

    @classmethod
    def parse(cls, text: str, unbounded_ok: bool = False) -> "DriftSpec":
        """``"sine"``, ``"zero"``, ``"constant:0.5"``, ``"scaled-tanh:2"``, ``"linear:0.5"``."""
        kind, _, arg = text.partition(":")
        if arg:
            try:
                param = float(arg)
            except ValueError:
                raise DomainError(f"bad drift parameter in {text!r}") from None
        else:
            param = 1.0 if kind in ("scaled-tanh", "linear") else 0.0
        return cls(kind, param, unbounded_ok=unbounded_ok)

    def __call__(self, t: float, x: float) -> float:
        return _REGISTRY[self.kind].func(t, x, self.param)

    @property
    def kernel_code(self) -> int | None:
        return _REGISTRY[self.kind].kernel_code

    def label(self) -> str:
        return self.kind if self.kind in ("zero", "sine") else f"{self.kind}:{self.param:g}"


@dataclass(frozen=True)
class SdeSpec:
    x0: float = 0.0
    drift: DriftSpec = DriftSpec()
    sigma: float = 1.0
    horizon: float = 1.0
    h: float = 0.5

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma!r}")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise DomainError(f"horizon must be positive, got {self.horizon!r}")
        if not 0.0 < self.h < 1.0:
            raise DomainError(f"Hurst index must lie in the open interval (0, 1), got {self.h!r}")

    def path_meta(self) -> dict:
        return {"h": self.h, "drift_kind": self.drift.label(), "sigma": self.sigma, "x0": self.x0}


def default_oversample(h: float) -> int:
    return 8 if h >= 0.5 else 1


def euler_from_noise(spec: SdeSpec, fine_increments: np.ndarray, oversample: int) -> np.ndarray:
    """Run the scheme on given fine-grid fBm increments; returns coarse values.

    ``fine_increments`` must hold ``n_obs * oversample`` increments of ``B^H``
    at mesh ``horizon / (n_obs * oversample)``.
    """
    noise = np.ascontiguousarray(fine_increments, dtype=float)
    if noise.ndim != 1 or noise.size % oversample:
        raise ShapeError(f"{noise.size} fine increments do not split into blocks of {oversample}")
    dt = spec.horizon / noise.size
    code = spec.drift.kernel_code
    if code is None:
        out, bad = _kernels.euler_callable(spec.drift, spec.x0, spec.sigma, dt, noise, oversample)
    else:
        out, bad = _kernels.euler_registry(code, spec.drift.param, spec.x0, spec.sigma, dt, noise, oversample)
    if bad >= 0:
        raise NumericalError(f"drift evaluated to a non-finite value at fine step {bad}")
    return out


def simulate_euler(spec: SdeSpec, n_obs: int, oversample: int | None = None, seed: int = 0,
                   *, rng: np.random.Generator | None = None, return_noise: bool = False):
    """Simulate ``n_obs`` steps over ``[0, horizon]``; the path has ``n_obs + 1`` values.

    With ``return_noise=True`` also returns the driving fBm (unscaled by sigma)
    on the same coarse grid.
    """
    if int(n_obs) != n_obs or n_obs < 2:
        raise DomainError(f"n_obs must be an integer >= 2, got {n_obs!r}")
    oversample = default_oversample(spec.h) if oversample is None else int(oversample)
    if oversample < 1:
        raise DomainError("oversample must be >= 1")
    n_fine = n_obs * oversample
    fine = FbmSpec(spec.h, n_fine + 1, spec.horizon / n_fine, seed)
    rng = rng if rng is not None else make_rng(seed, "sde")
    inc = sample_fgn(fine, rng=rng)
    values = euler_from_noise(spec, inc, oversample)
    meta = spec.path_meta() | {"seed": seed, "oversample": oversample}
    path = Path(spec.horizon / n_obs, values, meta)
    if return_noise:
        bpath = Path(path.delta, cumulate(inc)[::oversample], {"h": spec.h, "seed": seed})
        return path, bpath
    return path


def drift_component(x_path: Path, fbm_path: Path, spec: SdeSpec) -> Path:
    """``Y = X - x0 - sigma * B^H``, the absolutely continuous part of the solution."""
    if len(x_path) != len(fbm_path) or not math.isclose(x_path.delta, fbm_path.delta, rel_tol=1e-12):
        raise ShapeError("solution and noise paths must share length and mesh")
    y = x_path.values - spec.x0 - spec.sigma * fbm_path.values
    return Path(x_path.delta, y, {"component": "drift"})
