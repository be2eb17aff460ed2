"""Exit criteria of the laboratory, one test per criterion, at the stated tolerances.

Each test records a one-line PASS/FAIL summary (printed again in the
terminal summary) before asserting.
"""

import math
import time

import numpy as np
import pytest

from gribov_lab import bounds as bd
from gribov_lab.bargmann import GribovParams, TruncationSpec
from gribov_lab.linalg import eigen_product_det, fredholm_det, plemelj_det, schatten_norm
from gribov_lab.sturm import SturmProblem, gelfand_levitan_residual
from gribov_lab.trace_formula import (
    ContourSpec,
    contour_for,
    contour_nodes,
    correction_count_rule,
    correction_integral,
    correction_terms,
    eigen_offsets,
    minimal_correction_count,
    regularized_residual,
    second_order_boundary_pair,
)

pytestmark = pytest.mark.acceptance

BASE = GribovParams(1.0, 1.0, 0.1)
TREND_M = (5, 10, 20, 40)
NUC_MAX = 0.6


@pytest.fixture(scope="module")
def trend_reports():
    """Criterion 5 runs, shared with criteria 6 and 7."""
    start = time.perf_counter()
    reports = {m: regularized_residual(BASE, m, 4, trunc=TruncationSpec(4 * m + 20),
                                       spec=contour_for(BASE, m, nodes=1024))
               for m in TREND_M}
    return reports, time.perf_counter() - start


def test_criterion_01_diagonal_closure(record_criterion):
    params = GribovParams(1.0, 1.0, 0.0)
    start = time.perf_counter()
    worst = 0.0
    for m in range(3, 41):
        for j_max in (1, 4):
            rep = regularized_residual(params, m, j_max)
            worst = max(worst, abs(rep.residual) / (1e-9 * m * m))
    elapsed = time.perf_counter() - start
    ok = worst <= 1.0 and elapsed < 10.0
    record_criterion(1, ok, f"max |residual|/(1e-9 m^2) = {worst:.3e}, runtime {elapsed:.2f}s (< 10s)")
    assert ok


def test_criterion_02_residue_oracle_and_doubling(record_criterion):
    start = time.perf_counter()
    sigma, w = contour_nodes(ContourSpec(1.0, 64))
    inside = abs(np.sum(w / (0.0 - sigma)) + 1.0)
    outside = abs(np.sum(w / (2.0 - sigma)))
    # node doubling 512 -> 1024 on every correction whose nearest pole is >= 0.1 r from the contour
    worst_rel = 0.0
    checked = 0
    for m in range(3, 41):
        lo, hi = (m - 1) * m * (m - 2), (m + 1) * m * (m - 1)
        radius = 0.5 * (lo + hi)
        if (radius - lo) < 0.1 * radius:
            continue
        for t in correction_terms(BASE, m, 4):
            worst_rel = max(worst_rel, t.quad_error_estimate / abs(t.value))
            checked += 1
    elapsed = time.perf_counter() - start
    ok = inside < 1e-12 and outside < 1e-12 and worst_rel < 1e-10 and elapsed < 1.0
    record_criterion(2, ok, f"M=64 inside err {inside:.1e}, outside err {outside:.1e}; "
                            f"doubling max rel change {worst_rel:.2e} over {checked} integrals; "
                            f"runtime {elapsed:.2f}s (< 1s)")
    assert ok


def test_criterion_03_first_order_identity(record_criterion):
    worst = 0.0
    for lam in (0.0, 0.1, 0.5):
        params = GribovParams(1.0, 1.0, lam)
        for m in range(3, 41):
            t = correction_integral(params, m, 1)
            exact = -params.mu * m * (m + 1) / 2
            tol = 1e-10 * abs(exact) + t.quad_error_estimate
            worst = max(worst, abs(t.value - exact) / tol)
    ok = worst <= 1.0
    record_criterion(3, ok, f"max |c1 + mu m(m+1)/2| / (1e-10|c1| + quad err) = {worst:.3e} "
                            f"for lambda in {{0, 0.1, 0.5}}, m in 3..40")
    assert ok


def test_criterion_04_second_order_boundary_pair(record_criterion):
    worst = 0.0
    for m in range(3, 41):
        value = correction_integral(BASE, m, 2).value
        ref = second_order_boundary_pair(BASE, m)
        worst = max(worst, abs(value - ref) / abs(ref))
    ok = worst < 1e-8
    record_criterion(4, ok, f"max relative deviation from -lambda^2 m(m+1)/(3 lambda''(m-1)) = {worst:.2e}")
    assert ok


def test_criterion_05_convergence_trend(trend_reports, record_criterion):
    reports, elapsed = trend_reports
    mags = [abs(reports[m].residual) for m in TREND_M]
    decreasing = all(b < a for a, b in zip(mags, mags[1:]))
    ratio = mags[-1] / mags[0]
    ok = decreasing and ratio < 0.1 and elapsed < 120.0
    record_criterion(5, ok, "|residual| = " + ", ".join(f"{m}:{v:.2e}" for m, v in zip(TREND_M, mags))
                     + f"; ratio(40/5) = {ratio:.1e}; runtime {elapsed:.1f}s (< 120s)")
    assert ok


def test_criterion_06_count_invariance(trend_reports, record_criterion):
    reports, _ = trend_reports
    counts = {m: reports[m].counts_inside for m in TREND_M}
    ok = all(h == g == m for m, (h, g) in counts.items())
    record_criterion(6, ok, "counts (H, lambda''G) inside gamma_m: "
                     + ", ".join(f"{m}:{c}" for m, c in counts.items()))
    assert ok


def test_criterion_07_truncation_stability(trend_reports, record_criterion):
    reports, _ = trend_reports
    worst = 0.0
    for m in TREND_M:
        base = np.array(reports[m].eigenvalues)
        _, _, grown, _ = eigen_offsets(BASE, m, trunc=TruncationSpec(4 * m + 40))
        worst = max(worst, float(np.max(np.abs(np.array(grown) - base) / np.abs(base))))
    ok = worst < 1e-8
    record_criterion(7, ok, f"max relative change of sigma_k (k <= m) under N -> N+20: {worst:.2e}")
    assert ok


def test_criterion_08_determinant_consistency(record_criterion):
    rng = np.random.default_rng(2024)
    worst_eig = worst_plemelj = worst_mult = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 21))
        k = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        # 60 trace-log terms leave a tail <= t^61 / (61 (1 - t)) at ||K||_1 = t; t <= 0.6 keeps it < 1e-14
        k *= rng.uniform(0.05, NUC_MAX) / schatten_norm(k, 1).value
        d = fredholm_det(k)
        worst_eig = max(worst_eig, abs(eigen_product_det(k) - d) / abs(d))
        worst_plemelj = max(worst_plemelj, abs(plemelj_det(k, terms=60) - d) / abs(d))
    for _ in range(100):
        n = int(rng.integers(1, 21))
        a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / n
        b = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / n
        # (I + A)(I + B) = I + (A + B + AB)
        lhs = fredholm_det(a + b + a @ b)
        rhs = fredholm_det(a) * fredholm_det(b)
        worst_mult = max(worst_mult, abs(lhs - rhs) / abs(rhs))
    ok = worst_eig < 1e-8 and worst_plemelj < 1e-10 and worst_mult < 1e-10
    tail = NUC_MAX ** 61 / (61 * (1 - NUC_MAX))
    record_criterion(8, ok, f"eig-product {worst_eig:.1e} (< 1e-8), trace-log {worst_plemelj:.1e} (< 1e-10, "
                            f"||K||_1 <= {NUC_MAX}, series tail bound {tail:.0e}), "
                            f"multiplicativity {worst_mult:.1e} (< 1e-10)")
    assert ok


def test_criterion_09_interpolation_inequality(record_criterion):
    start = time.perf_counter()
    rep = bd.check_interpolation_inequality(100_000)
    elapsed = time.perf_counter() - start
    ok = rep.max_ratio <= 1 + 1e-12 and elapsed < 1.0
    record_criterion(9, ok, f"max ratio {rep.max_ratio:.15f} over 1e5 samples, runtime {elapsed:.2f}s (< 1s)")
    assert ok


def test_criterion_10_gap_and_separation(record_criterion):
    gap = bd.gap_bound_scan(10_000)
    n = np.arange(2, 10_001)
    ratio_exact = np.all(3 * (n - 1) * n * n == (((n + 1) * n * (n - 1)) - n * (n - 1) * (n - 2)) * n)
    sep = bd.separation_scan(500, 0.1)
    ok = gap.extras["closed_form_exact"] and bool(ratio_exact) and sep.constant > 0
    record_criterion(10, ok, f"gap ratio == 3(1-1/n) exactly for n <= 1e4: {gap.extras['closed_form_exact']}; "
                             f"separation constant (eps=0.1, n <= 500) = {sep.constant:.4f} at {sep.arg_max}")
    assert ok


def test_criterion_11_resolvent_sums(record_criterion):
    res = bd.resolvent_sum_sweep(range(3, 201), n_max=1_000_000)
    tn = bd.trace_norm_sweep(range(3, 201))
    ok = math.isfinite(res.max_ratio) and math.isfinite(tn.max_ratio)
    record_criterion(11, ok, f"sup_m sum 1/|lambda_n - sigma_m| = {res.max_ratio:.6f} (m={res.arg_max}, "
                             f"tail <= {res.extras['tail_bound']:.1e}); sup_m m||(G-sigma)^-1||_1 = "
                             f"{tn.max_ratio:.6f} (m={tn.arg_max})")
    assert ok


def test_criterion_12_nuclear_decay(record_criterion):
    rep = bd.nuclear_decay_fit(BASE, 0.5, 0.1, range(10, 101))
    ok = rep.fitted_slope <= -0.1
    record_criterion(12, ok, f"fitted log-log slope {rep.fitted_slope:.4f} (<= -alpha = -0.1)")
    assert ok


def test_criterion_13_correction_count(record_criterion):
    at_point = correction_count_rule(0.5, 0.15)
    scan = minimal_correction_count()
    ok = at_point == 5 and scan["minimal_count"] == 5
    record_criterion(13, ok, f"l(0.5, 0.15) = {at_point}; minimum over admissible window = "
                             f"{scan['minimal_count']} (bound infimum {scan['infimum_of_bound']:.6f})")
    assert ok


def test_criterion_14_gelfand_levitan(record_criterion):
    start = time.perf_counter()
    out = {}
    for pot in ("cos2x", "zero", "linear_centered"):
        out[pot] = gelfand_levitan_residual(SturmProblem(pot, 2048, 40), grids=(2048, 4096))
    elapsed = time.perf_counter() - start
    ok = (abs(out["cos2x"].extrapolated_sum - 0.5) < 1e-2
          and abs(out["zero"].extrapolated_sum) < 1e-2
          and abs(out["linear_centered"].extrapolated_sum) < 1e-2
          and all(r.cauchy_tail < 1e-3 for r in out.values())
          and elapsed < 60.0)
    record_criterion(14, ok, "extrapolated sums " + ", ".join(
        f"{k}={v.extrapolated_sum:.4f} (tail {v.cauchy_tail:.1e})" for k, v in out.items())
        + f"; runtime {elapsed:.2f}s (< 60s)")
    assert ok


def test_criterion_15_subordination(record_criterion):
    rep = bd.subordination_constant(BASE, n_max=10_000)
    dev = rep.extras["relative_deviation"]
    ok = math.isfinite(rep.max_ratio) and dev < 0.05
    record_criterion(15, ok, f"sup ratio {rep.max_ratio:.4f} at {rep.arg_max}; squared-ratio limit "
                             f"{rep.extras['squared_limit_fit']:.6f} vs 2 lambda^2 = "
                             f"{rep.extras['squared_limit_expected']:.6f} (rel dev {dev:.1e} < 5%)")
    assert ok
