"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
when output capture is on).
"""
import math
import statistics
import time

import numpy as np
import pytest

from conftest import CORPUS, H_GRID, brute_fbm_cov, gram_filter_cov
from fracvar.estimators import (
    builtin_families,
    h1_from_d,
    h2_estimator,
    h2_from_d,
    ratio_estimator,
)
from fracvar.fbm import FbmSpec, fbm_covariance_matrix, sample_fbm_cholesky, sample_fgn
from fracvar.filters import Filter, filter_covariance, filter_variance, order, thin
from fracvar.harness import REFERENCE_MSE, builtin_settings, clt_study, run_setting
from fracvar.path import Path, cumulate
from fracvar.rng import make_rng
from fracvar.sde import DriftSpec, SdeSpec
from fracvar.variations import asymptotic_variance, mesh_admissible, variation_report

CLT_CASES = [(0.3, Filter((-1, 1)), 1.0), (0.5, Filter((-1, 1)), 1.0), (0.8, Filter((1, -2, 1)), 2.0)]


@pytest.fixture
def report(capsys):
    def _report(number, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {number:>2}: {'PASS' if ok else 'FAIL'} | {detail}")
        assert ok, detail
    return _report


def test_criterion_01_variance_vs_gram(report):
    t0 = time.perf_counter()
    worst, worst_self = 0.0, 0.0
    for f in CORPUS:
        for h in H_GRID:
            var = filter_variance(f, 0.37, h)
            for lag in range(6):
                ref = gram_filter_cov(f.coeffs, 0.37, h, lag)
                err = abs(filter_covariance(f, 0.37, h, lag) - ref)
                # covariances are measured on the scale of the filter variance: some lags
                # vanish exactly (e.g. H = 1/2) and the oracle only returns rounding noise there
                worst = max(worst, err / var)
                if abs(ref) > 1e-3 * var:
                    worst_self = max(worst_self, err / abs(ref))
    dt = time.perf_counter() - t0
    report(1, worst <= 1e-10 and dt < 1.0,
           f"max err/sigma {worst:.2e} (tol 1e-10); max err/|cov| on non-negligible lags "
           f"{worst_self:.2e}; {dt:.2f}s")


def test_criterion_02_dilation(report):
    t0 = time.perf_counter()
    worst = 0.0
    for f in CORPUS:
        for h in H_GRID:
            for delta in (1e-3, 0.25, 1.0, 3.0):
                a = filter_variance(thin(f), delta, h)
                b = filter_variance(f, 2 * delta, h)
                worst = max(worst, abs(a - b) / abs(b))
    dt = time.perf_counter() - t0
    report(2, worst <= 1e-12 and dt < 1.0, f"max rel err {worst:.2e} (tol 1e-12), {dt:.2f}s")


def test_criterion_03_sampler_law(report):
    t0 = time.perf_counter()
    npaths, n = 10_000, 64
    details, ok = [], True
    for h in (0.2, 0.5, 0.8):
        spec = FbmSpec(h, n + 1, 1.0 / n, 17)
        circ = cumulate(sample_fgn(spec, size=npaths, rng=make_rng(17, "accept-circ", h)))[:, 1:]
        chol = sample_fbm_cholesky(spec, size=npaths, rng=make_rng(17, "accept-chol", h))[:, 1:]
        cov = fbm_covariance_matrix(h, n + 1, 1.0 / n)
        # cross-check the package covariance against the independent formula
        t = np.arange(1, n + 1) / n
        assert np.allclose(cov, brute_fbm_cov(t[:, None], t[None, :], h), rtol=1e-14, atol=0)
        # known-mean estimator: Var(X_i X_j) = C_ii C_jj + C_ij^2
        se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / npaths)
        emp_c = circ.T @ circ / npaths
        emp_k = chol.T @ chol / npaths
        z_c = np.max(np.abs(emp_c - cov) / se)
        z_k = np.max(np.abs(emp_k - cov) / se)
        # two independent estimates: the difference has standard error sqrt(2) se
        z_ck = np.max(np.abs(emp_c - emp_k) / (math.sqrt(2) * se))
        ok &= z_c < 4 and z_k < 4 and z_ck < 5
        details.append(f"H={h}: z_circ={z_c:.2f} z_chol={z_k:.2f} z_diff={z_ck:.2f}")
    dt = time.perf_counter() - t0
    report(3, ok and dt < 60, "; ".join(details) + f" (limits 4/4/5), {dt:.1f}s")


def test_criterion_04_as_convergence(report):
    t0 = time.perf_counter()
    n, reps = 8192, 100
    details, ok = [], True
    for h, f, _ in CLT_CASES:
        spec = FbmSpec(h, n + 1, 1.0 / n, 4)
        hits = 0
        for r in range(reps):
            obs = Path(1.0 / n, cumulate(sample_fgn(spec, rng=make_rng(4, "accept-as", h, r)))[1:])
            hits += abs(variation_report(obs, f, h).v) < 5 / math.sqrt(n)
        ok &= hits >= 99
        details.append(f"H={h} a={f}: {hits}/{reps}")
    dt = time.perf_counter() - t0
    report(4, ok and dt < 120, "; ".join(details) + f" (need >=99), {dt:.1f}s")


def test_criterion_05_clt(report):
    t0 = time.perf_counter()
    details, ok = [], True
    exact = asymptotic_variance(Filter((-1, 1)), 0.5)
    ok &= abs(exact - 2.0) < 1e-12
    details.append(f"sigma(0.5,(-1,1))={exact:.15g}")
    for h, f, alpha in CLT_CASES:
        assert mesh_admissible(h, alpha, order(f)).clt_applies
        for label, sde in (("fBm", None), ("SDE", SdeSpec(0.0, DriftSpec("sine"), 1.0, 1.0, h))):
            rep = clt_study(f, h, alpha, 4096, 2000, seed=1, sde=sde)
            good = (abs(rep.variance_ratio - 1) <= 0.15 and abs(rep.skewness) < 0.3
                    and abs(rep.excess_kurtosis) < 0.5)
            ok &= good
            details.append(f"{label} H={h} alpha={alpha}: ratio={rep.variance_ratio:.3f} "
                           f"skew={rep.skewness:+.3f} kurt={rep.excess_kurtosis:+.3f}")
    dt = time.perf_counter() - t0
    report(5, ok and dt < 300, "; ".join(details) + f", {dt:.1f}s")


@pytest.fixture(scope="module")
def studies():
    t0 = time.perf_counter()
    reports = {s.label: run_setting(s) for s in builtin_settings()}
    return reports, time.perf_counter() - t0


def test_criterion_06_consistency(report, studies):
    reports, dt = studies
    details, ok = [], True
    for label in ("Study-S1", "Study-S2", "Study-S6"):
        rep = reports[label]
        med = [statistics.median(abs(e - rep.setting.h_true) for e in c.estimates) for c in rep.per_n]
        mono = all(b < a for a, b in zip(med, med[1:]))
        ok &= mono
        details.append(f"{label}: " + " > ".join(f"{m:.2e}" for m in med))
    report(6, ok and dt < 600, "; ".join(details) + f", studies {dt:.1f}s")


def test_criterion_07_mse_table(report, studies):
    reports, dt = studies
    worst, worst_cell, inside = 1.0, None, 0
    for label, ref in REFERENCE_MSE.items():
        for c, target in zip(reports[label].per_n, ref):
            factor = max(c.mse / target, target / c.mse)
            inside += factor <= 3
            if factor > worst:
                worst, worst_cell = factor, f"{label}/n={c.n}"
    spots = [("Study-S1", 8000, 1.82e-6), ("Study-S2", 2000, 2.7e-4),
             ("Study-S5", 8000, 2.5e-3), ("Study-S6", 8000, 1.4e-4)]
    spot_txt = ", ".join(f"{l}/{n}: {reports[l].cell(n).mse:.3g} vs {t:.3g}" for l, n, t in spots)
    spot_ok = all(max(reports[l].cell(n).mse / t, t / reports[l].cell(n).mse) <= 3 for l, n, t in spots)
    report(7, inside == 28 and spot_ok and dt < 1800,
           f"{inside}/28 cells within x3 (worst x{worst:.2f} at {worst_cell}); {spot_txt}")


def test_criterion_08_orderings(report, studies):
    reports, _ = studies
    s5 = reports["Study-S5"].cell(8000).mse
    s6 = reports["Study-S6"].cell(8000).mse
    report(8, s6 < s5, f"MSE(S6,8000)={s6:.3g} < MSE(S5,8000)={s5:.3g}")


def test_criterion_09_invariances(report):
    t0 = time.perf_counter()
    n = 4000
    obs = Path(1.0 / n, cumulate(sample_fgn(FbmSpec(0.7, n + 1, 1.0 / n, 9)))[1:])
    fam = builtin_families()["order1"]
    checks = {}
    for base in (Filter((-1, 1)), Filter((1, -2, 1))):
        ref = ratio_estimator(obs, base).value
        checks[f"ratio{base} scale"] = all(
            ratio_estimator(obs.scaled(c), base).value == ref for c in (2.0, 0.125, -4.0, 1024.0))
        checks[f"ratio{base} delta"] = all(
            ratio_estimator(obs.with_delta(d), base).value == ref for d in (1.0, 1e-6, 17.0))
    ref2 = h2_estimator(fam, obs).value
    checks["h2 delta"] = all(h2_estimator(fam, obs.with_delta(d)).value == ref2 for d in (1.0, 1e-6, 17.0))
    plug = 0.0
    for h in (0.05, 0.3, 0.5, 0.7, 0.95):
        for delta in (1e-4, 0.1, 3.0):
            for p in (2, 3, 6):
                d = (delta * np.arange(1, p + 1)) ** (2 * h)
                plug = max(plug, abs(h1_from_d(d, delta) - h), abs(h2_from_d(d) - h))
    checks["plug-in"] = plug < 1e-12
    dt = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    report(9, not failed and dt < 1.0,
           f"{len(checks) - len(failed)}/{len(checks)} exact checks; plug-in err {plug:.1e}; {dt:.2f}s")


def test_criterion_10_design_identity(report):
    t0 = time.perf_counter()
    worst = 0.0
    for fam in builtin_families().values():
        for h in H_GRID + [0.98]:
            for delta in (1e-3, 0.5, 2.0):
                d = (delta * np.arange(1, fam.p_max + 1)) ** (2 * h)
                sig = np.array([filter_variance(f, delta, h) for f in fam.filters])
                worst = max(worst, float(np.max(np.abs(fam.design @ d - sig) / np.abs(sig))))
    dt = time.perf_counter() - t0
    report(10, worst <= 1e-12 and dt < 1.0, f"max rel err {worst:.2e} (tol 1e-12), {dt:.2f}s")
