import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS
from fracvar.errors import DomainError, LengthError, ScopeError
from fracvar.fbm import FbmSpec, sample_fgn
from fracvar.filters import Filter, filter_variance, order
from fracvar.harness import clt_study
from fracvar.path import Path, cumulate
from fracvar.variations import (
    SamplingGrid,
    asymptotic_variance,
    asymptotic_variance_tail,
    mesh_admissible,
    rho,
    u_statistic,
    v_statistic,
    variation_report,
)

INC = Filter((-1, 1))
D2 = Filter((1, -2, 1))


def test_sampling_grid():
    g = SamplingGrid.from_alpha(1000, 1.5)
    assert g.delta == pytest.approx(1000**-1.5)
    with pytest.raises(DomainError):
        SamplingGrid(100, 0.02, alpha=1.0)


def test_u_examples():
    assert u_statistic(Path(1.0, [2.0] * 6), INC) == 0.0
    assert u_statistic(Path(1.0, 0.3 * np.arange(10.0)), D2) == pytest.approx(0.0, abs=1e-28)
    assert u_statistic(Path(1.0, [0, 1, 0, 1, 0]), INC) == pytest.approx(0.8, rel=1e-15)
    with pytest.raises(LengthError):
        u_statistic(Path(1.0, [0.0, 1.0]), D2)


def test_v_constant_path():
    p = Path(0.01, np.full(20, 3.0))
    assert v_statistic(p, D2, 0.6) == pytest.approx(-(20 - 2) / 20)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), h=st.floats(0.05, 0.95), n=st.integers(6, 300),
       fi=st.integers(0, len(CORPUS) - 1), delta=st.floats(1e-4, 10.0))
def test_v_u_identity(seed, h, n, fi, delta):
    f = CORPUS[fi]
    x = np.random.default_rng(seed).normal(size=n)
    rep = variation_report(Path(delta, x), f, h)
    sigma = filter_variance(f, delta, h)
    assert rep.n_terms == n - f.p
    assert rep.v == pytest.approx(rep.u / sigma - (n - f.p) / n, rel=1e-12, abs=1e-12)


def test_rho_examples():
    for f in CORPUS:
        assert rho(f, 0.37, 0) == pytest.approx(1.0, rel=1e-14)
    assert rho(INC, 0.5, 4) == 0.0
    assert rho(INC, 0.7, 1) == pytest.approx((2**1.4 - 2) / 2, rel=1e-13)


@pytest.mark.parametrize("f", CORPUS)
def test_rho_symmetric_and_bounded(f):
    lags = np.arange(-40, 41)
    for h in (0.1, 0.5, 0.9):
        r = rho(f, h, lags)
        np.testing.assert_array_equal(r, r[::-1])
        assert np.all(np.abs(r) <= 1 + 1e-12)


def test_asymptotic_variance_brownian_exact():
    assert asymptotic_variance(INC, 0.5) == pytest.approx(2.0, abs=1e-12)


def test_asymptotic_variance_monotone_and_tail():
    values = [asymptotic_variance(INC, 0.3, t) for t in (1, 10, 100, 1000, 10**5)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    # tail estimate bridges the truncation gap
    full = asymptotic_variance(INC, 0.3, 10**6)
    short = asymptotic_variance(INC, 0.3, 1000) + asymptotic_variance_tail(INC, 0.3, 1000)
    assert short == pytest.approx(full, rel=1e-5)
    assert asymptotic_variance_tail(INC, 0.3) < 1e-9


def test_asymptotic_variance_scope():
    with pytest.raises(ScopeError, match="H \\+ 1/4"):
        asymptotic_variance(INC, 0.9)
    asymptotic_variance(D2, 0.9, 1000)


def test_weighted_rho_summable_h09():
    lags = np.arange(1, 10**5 + 1)
    terms = (lags * rho(D2, 0.9, lags)) ** 2
    head = terms[:10**4].sum()
    tail = terms[10**4:].sum()
    assert order(D2) == 2
    assert tail < 1e-3 * head


def test_mesh_admissible_examples():
    assert mesh_admissible(0.3, 1.0, 1).clt_applies
    assert mesh_admissible(0.7, 1.0, 1).clt_applies
    bad = mesh_admissible(0.8, 1.0, 2)
    assert not bad.clt_applies
    assert any("(2H-1)/(2-2H) = 1.5" in name for name in bad.violated)
    assert mesh_admissible(0.8, 2.0, 2).clt_applies
    assert not mesh_admissible(0.8, 2.0, 1).clt_applies
    assert not mesh_admissible(0.3, 0.7, 1).clt_applies
    assert not mesh_admissible(0.6, 0.9, 2).clt_applies


def _fbm_v(h, f, n, seed, alpha=1.0):
    delta = n ** -alpha
    inc = sample_fgn(FbmSpec(h, n + 1, delta, seed))
    return v_statistic(Path(delta, cumulate(inc)[1:]), f, h)


def test_v_small_on_fbm():
    n = 8192
    hits = sum(abs(_fbm_v(0.6, INC, n, s)) < 5 / math.sqrt(n) for s in range(100))
    assert hits >= 99


@pytest.mark.slow
@pytest.mark.parametrize("f, h", [(INC, 0.3), (D2, 0.8)])
def test_asymptotic_variance_vs_monte_carlo(f, h):
    rep = clt_study(f, h, 2.0, 4096, 2000, seed=77)
    assert rep.variance_ratio == pytest.approx(1.0, abs=0.10)


@pytest.mark.slow
def test_breakdown_variance_grows():
    small = clt_study(INC, 0.9, 1.0, 1024, 500, seed=3)
    large = clt_study(INC, 0.9, 1.0, 8192, 500, seed=3)
    assert small.asymptotic_variance is None
    assert large.variance > 1.5 * small.variance
