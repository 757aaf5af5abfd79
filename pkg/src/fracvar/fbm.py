"""Exact fractional Brownian motion sampling on uniform grids.

The fast generator embeds the fractional Gaussian noise autocovariance in a
circulant matrix and diagonalizes it with the FFT; the Cholesky sampler is the
slow exact oracle used to cross-check it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from fracvar.errors import DomainError, NumericalError
from fracvar.path import Path, cumulate
from fracvar.rng import make_rng

log = logging.getLogger(__name__)

CHOLESKY_MAX_POINTS = 4096
EIGEN_CLAMP = 1e-9


@dataclass(frozen=True)
class FbmSpec:
    h: float
    n_points: int
    delta: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.h < 1.0:
            raise DomainError(f"Hurst index must lie in the open interval (0, 1), got {self.h!r}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise DomainError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


def fbm_covariance(s, t, h: float):
    """``E[B_s B_t] = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2``."""
    if not 0.0 < h < 1.0:
        raise DomainError(f"Hurst index must lie in the open interval (0, 1), got {h!r}")
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise DomainError("fBm covariance needs nonnegative times")
    two_h = 2.0 * h
    out = 0.5 * (t**two_h + s**two_h - np.abs(t - s) ** two_h)
    return float(out) if out.ndim == 0 else out


def fgn_autocovariance(h: float, n: int) -> np.ndarray:
    """Unit-mesh fGn autocovariance ``gamma(0..n-1)``."""
    k = np.arange(n, dtype=float)
    two_h = 2.0 * h
    return 0.5 * (np.abs(k + 1) ** two_h - 2.0 * k**two_h + np.abs(k - 1) ** two_h)


@lru_cache(maxsize=16)
def _circulant_sqrt_eigs(h: float, n: int) -> np.ndarray | None:
    # first row (g0..g_n, g_{n-1}..g1) of the 2n circulant; None when not PSD
    gamma = fgn_autocovariance(h, n + 1)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    lam = np.fft.fft(row).real
    lo = lam.min()
    if lo < -EIGEN_CLAMP * lam.max():
        return None
    lam = np.where(lam < 0, 0.0, lam)
    out = np.sqrt(lam / row.size)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def _toeplitz_cholesky(h: float, n: int) -> np.ndarray:
    gamma = fgn_autocovariance(h, n)
    idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return np.linalg.cholesky(gamma[idx])


def sample_fgn(spec: FbmSpec, *, size: int | None = None,
               rng: np.random.Generator | None = None) -> np.ndarray:
    """``n_points - 1`` fGn increments at mesh ``spec.delta``.

    With ``size`` set, returns a ``(size, n_points - 1)`` array of independent rows.
    ``rng`` overrides the stream derived from ``spec.seed``.
    """
    rng = rng if rng is not None else make_rng(spec.seed, "fgn")
    n = spec.n_points - 1
    rows = 1 if size is None else int(size)
    scale = spec.delta**spec.h
    sq = _circulant_sqrt_eigs(float(spec.h), n)
    if sq is None:
        log.warning("circulant embedding not PSD for H=%s n=%d; using Cholesky", spec.h, n)
        chol = _toeplitz_cholesky(float(spec.h), n)
        out = rng.standard_normal((rows, n)) @ chol.T
    else:
        m = sq.size
        z = rng.standard_normal((rows, m)) + 1j * rng.standard_normal((rows, m))
        out = np.fft.fft(sq * z, axis=-1).real[:, :n]
    out *= scale
    return out[0] if size is None else out


def sample_fbm(spec: FbmSpec, *, rng: np.random.Generator | None = None) -> Path:
    inc = sample_fgn(spec, rng=rng)
    return Path(spec.delta, cumulate(inc), {"h": spec.h, "seed": spec.seed})


def fbm_covariance_matrix(h: float, n_points: int, delta: float) -> np.ndarray:
    """Covariance of ``(B_delta, ..., B_{(n_points - 1) delta})``."""
    t = np.arange(1, n_points) * delta
    return fbm_covariance(t[:, None], t[None, :], h)


def sample_fbm_cholesky(spec: FbmSpec, *, size: int | None = None,
                        rng: np.random.Generator | None = None):
    """Exact fBm via the lower Cholesky factor of the grid covariance.

    Returns a :class:`Path`, or a ``(size, n_points)`` array of path values
    when ``size`` is given.
    """
    if spec.n_points > CHOLESKY_MAX_POINTS:
        raise DomainError(f"Cholesky sampler is limited to {CHOLESKY_MAX_POINTS} points")
    rng = rng if rng is not None else make_rng(spec.seed, "fbm-cholesky")
    cov = fbm_covariance_matrix(spec.h, spec.n_points, spec.delta)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"fBm covariance factorization failed: {exc}") from None
    rows = 1 if size is None else int(size)
    z = rng.standard_normal((rows, spec.n_points - 1))
    vals = np.concatenate([np.zeros((rows, 1)), z @ chol.T], axis=1)
    if size is None:
        return Path(spec.delta, vals[0], {"h": spec.h, "seed": spec.seed})
    return vals
