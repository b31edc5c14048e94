"""Acceptance criteria 1-10, one printed PASS/FAIL line per check.

Run with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
Criteria that cannot be met with double-precision inputs or at the stated
finite size are marked ``xfail(strict=True)``: they still print their
measured value as FAIL, and an unexpected pass is reported as an error.
"""

import math
import sys
import time

import numpy as np
import pytest

from pnglab.distributions import Kind, cdf_at, cdf_table, mean_variance
from pnglab.exact import lpp_cdf_exact, png_cdf_exact
from pnglab.harness import Model, ScalingSpec, ks_distance, run_mc
from pnglab.painleve2 import solve_hastings_mcleod
from pnglab.sampler import brute_force_chain, longest_weak_chain, png_points, sample_png_config
from pnglab.specfun import normal_cdf
from pnglab.transition import ab_at, ab_profile_x, theta

GUE_MEAN = -1.77109
GOE_MEAN_STATED = -0.76007

# every Monte Carlo run made here, keyed for the bitwise rerun of criterion 10
_MC_RUNS: dict = {}


def _report(log, crit: str, ok: bool, text: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {crit}: {text}"
    log.append(line)
    print(line)
    return ok


def _mc(model, regime, samples, seed, **params):
    spec = ScalingSpec.make(regime, **params)
    s = run_mc(model, spec, samples, seed, threads=1)
    _MC_RUNS[(model, spec, samples, seed)] = s
    return s


def _dt(table, kind, *params):
    return cdf_table(table, kind, params)


def _unattainable(reason):
    return pytest.mark.xfail(strict=True, reason=reason)


# ---- 1 -------------------------------------------------------------------------


def test_c1_painleve_core(acceptance_log):
    t0 = time.perf_counter()
    pt = solve_hastings_mcleod(-10.0, 8.0, 0.005, 1e-11)
    elapsed = time.perf_counter() - t0
    half = solve_hastings_mcleod(-10.0, 8.0, 0.0025, 1e-11)
    res = float(np.max(np.abs(pt.first_integral_residual())))
    dh = float(np.max(np.abs(half.u[::2] - pt.u)))
    ok = res < 1e-8 and dh < 1e-9 and elapsed < 30
    assert _report(acceptance_log, "1", ok, f"residual {res:.2e} < 1e-8, halving {dh:.2e} < 1e-9, solve {elapsed:.1f}s < 30s")


# ---- 2 -------------------------------------------------------------------------


def test_c2a_gue_f0_means(table, acceptance_log):
    m_gue = mean_variance(_dt(table, Kind.GUE))[0]
    m_f0 = mean_variance(_dt(table, Kind.F0))[0]
    ok = abs(m_gue - GUE_MEAN) < 5e-4 and abs(m_f0) < 1e-3
    assert _report(acceptance_log, "2a", ok, f"mean F_GUE {m_gue:.6f} (target -1.77109 +- 5e-4), mean F_0 {m_f0:.2e} (|.| < 1e-3)")


@_unattainable("F_GOE = F E has mean -1.20653; the stated -0.76007 is not the mean of this law")
def test_c2b_goe_mean(table, acceptance_log):
    m = mean_variance(_dt(table, Kind.GOE))[0]
    ok = abs(m - GOE_MEAN_STATED) < 5e-4
    assert _report(acceptance_log, "2b", ok, f"mean F_GOE {m:.6f} (target -0.76007 +- 5e-4)")


def test_c2c_h_means(acceptance_log):
    # solved afresh so that the runtime covers the table; the right end is
    # pushed to 20 because H(.;1,-1) still has 3% of its mass beyond x = 8
    t0 = time.perf_counter()
    wide_table = solve_hastings_mcleod(-10.0, 20.0, 0.005, 1e-11)
    errs = {}
    for w in (0.0, 0.5, -0.5, 1.0):
        m = mean_variance(_dt(wide_table, Kind.H, w, -w))[0]
        errs[w] = m - 4 * w * w
    worst = max(abs(e) for e in errs.values())
    elapsed = time.perf_counter() - t0
    ok = worst < 5e-3 and elapsed < 120
    detail = ", ".join(f"w={w:+.1f}: {e:+.1e}" for w, e in errs.items())
    assert _report(acceptance_log, "2c", ok, f"mean H(.;w,-w) - 4w^2 [{detail}] (|.| < 5e-3), {elapsed:.1f}s < 120s")


# ---- 3 -------------------------------------------------------------------------


def test_c3a_identities(table, acceptance_log):
    g0 = np.max(np.abs(_dt(table, Kind.G, 0.0).cdf - _dt(table, Kind.GOE_SQUARED).cdf))
    h0 = np.max(np.abs(_dt(table, Kind.H, 0.0, 0.0).cdf - _dt(table, Kind.F0).cdf))
    gap = np.min(_dt(table, Kind.GSE).cdf - _dt(table, Kind.GOE).cdf)
    ok = g0 < 1e-6 and h0 < 1e-6 and gap >= 0
    assert _report(acceptance_log, "3a", ok, f"|G(.;0)-F_GOE^2| {g0:.1e}, |H(.;0,0)-F_0| {h0:.1e} (< 1e-6), min(F_GSE-F_GOE) {gap:.1e} >= 0")


def test_c3b_symmetry(table, acceptance_log):
    xs = np.linspace(-8.0, 7.0, 31)
    worst = 0.0
    for w in (0.5, 1.0, 2.0, 3.0):
        a_pos, _ = ab_at(table, xs, w)
        _, b_neg = ab_at(table, xs, -w)
        rel = np.abs(a_pos + b_neg * np.exp(theta(xs, w))) / np.abs(a_pos)
        worst = max(worst, float(np.max(rel)))
    assert _report(acceptance_log, "3b", worst < 1e-6, f"a(x,w) = -b(x,-w) e^theta relative residual {worst:.1e} < 1e-6")


def _route_gap(table, w):
    xs = table.x[::10]
    a, b = ab_at(table, xs, w, route="w")
    p = ab_profile_x(table, w)
    return float(max(np.max(np.abs(a - p.a[::10])), np.max(np.abs(b - p.b[::10]))))


def test_c3c_routes(table, acceptance_log):
    gaps = {w: _route_gap(table, w) for w in (0.25, 0.5, 1.0)}
    worst = max(gaps.values())
    detail = ", ".join(f"w={w}: {g:.1e}" for w, g in gaps.items())
    assert _report(acceptance_log, "3c", worst < 1e-6, f"w-route vs x-route [{detail}] < 1e-6")


@_unattainable("the w-series amplifies double-precision error in u by about exp(theta); at w=2, x<1.3 this exceeds 1e-6")
def test_c3d_routes_w2(table, acceptance_log):
    g = _route_gap(table, 2.0)
    assert _report(acceptance_log, "3d", g < 1e-6, f"w-route vs x-route at w=2 over the whole grid {g:.1e} < 1e-6")


# ---- 4 -------------------------------------------------------------------------


@_unattainable("H(.;w,w) approaches F_GUE at rate about 1/w; at w=3 the gap is 0.109")
def test_c4a_h33(table, acceptance_log):
    d = float(np.max(np.abs(_dt(table, Kind.H, 3.0, 3.0).cdf - _dt(table, Kind.GUE).cdf)))
    assert _report(acceptance_log, "4a", d < 0.02, f"sup |H(.;3,3) - F_GUE| {d:.3f} < 0.02")


def test_c4b_gaussian_frame(table, acceptance_log):
    w = -2.5
    y = np.linspace(-2.0, 2.0, 401)
    g = cdf_at(table, Kind.G, (w,), 2 * y * math.sqrt(-w) + 4 * w * w)
    d = float(np.max(np.abs(g - normal_cdf(y))))
    assert _report(acceptance_log, "4b", d < 0.03, f"sup |G(2x sqrt|w| + 4w^2; -2.5) - Phi(x)| {d:.4f} < 0.03")


# ---- 5 -------------------------------------------------------------------------


def test_c5_exact_vs_mc(acceptance_log):
    t0 = time.perf_counter()
    png = _mc(Model.PNG, "PNG_TW", 100_000, 5, t=4.0, alpha_plus=0.5, alpha_minus=0.5)
    ex = png_cdf_exact(4.0, 0.5, 0.5, int(png.raw.max()) + 1).cdf
    d1 = float(np.max(np.abs(np.searchsorted(np.sort(png.raw), np.arange(len(ex)), "right") / png.count - ex)))
    lpp = _mc(Model.LPP, "LPP_TW", 100_000, 6, n=6, q=0.25)
    ex = lpp_cdf_exact(6, 0.25, 0.0, 0.0, int(lpp.raw.max()) + 1).cdf
    d2 = float(np.max(np.abs(np.searchsorted(np.sort(lpp.raw), np.arange(len(ex)), "right") / lpp.count - ex)))
    elapsed = time.perf_counter() - t0
    ok = d1 < 0.01 and d2 < 0.01 and elapsed < 120
    assert _report(acceptance_log, "5", ok, f"PNG t=4 |exact-ECDF| {d1:.4f}, LPP N=6 {d2:.4f} (< 0.01), {elapsed:.0f}s < 120s")


# ---- 6 -------------------------------------------------------------------------

_C6_TIME = []


def test_c6a_tracy_widom(table, acceptance_log):
    t0 = time.perf_counter()
    s = _mc(Model.PNG, "PNG_TW", 4000, 2024, t=100.0)
    ks = ks_distance(s, _dt(table, Kind.GUE))
    _C6_TIME.append(time.perf_counter() - t0)
    ok = ks < 0.1 and abs(s.mean - GUE_MEAN) < 0.25
    assert _report(acceptance_log, "6a", ok, f"t=100 KS vs F_GUE {ks:.4f} < 0.1, scaled mean {s.mean:.3f} within 0.25 of -1.771")


def test_c6b_gaussian(table, acceptance_log):
    t0 = time.perf_counter()
    s = _mc(Model.PNG, "PNG_GAUSS", 4000, 2024, t=100.0, alpha_plus=2.0, alpha_minus=0.0)
    ks = ks_distance(s, _dt(table, Kind.NORMAL))
    _C6_TIME.append(time.perf_counter() - t0)
    assert _report(acceptance_log, "6b", ks < 0.05, f"t=100 alpha+=2 KS vs Phi {ks:.4f} < 0.05")


def test_c6c_gaussian_squared(table, acceptance_log):
    t0 = time.perf_counter()
    s = _mc(Model.PNG, "PNG_GAUSS", 4000, 2024, t=100.0, alpha_plus=2.0, alpha_minus=2.0)
    ks = ks_distance(s, _dt(table, Kind.NORMAL_SQUARED))
    _C6_TIME.append(time.perf_counter() - t0)
    assert _report(acceptance_log, "6c", ks < 0.05, f"t=100 alpha+-=2 KS vs Phi^2 {ks:.4f} < 0.05")


def test_c6d_exact_mean(acceptance_log):
    t0 = time.perf_counter()
    s = _mc(Model.PNG, "CRITICAL_PNG", 100_000, 2024, t=50.0, w_plus=0.0, w_minus=0.0)
    _C6_TIME.append(time.perf_counter() - t0)
    se = math.sqrt(np.var(s.raw) / s.count)
    dev = s.raw_mean - 100.0
    total = sum(_C6_TIME)
    ok = abs(dev) < 3 * se and total < 300
    assert _report(acceptance_log, "6d", ok, f"t=50 alpha+-=1 mean L - 2t = {dev:+.4f} (3 SE = {3 * se:.4f}); criterion 6 total {total:.0f}s < 300s")


# ---- 7 -------------------------------------------------------------------------


@pytest.mark.parametrize("case", ["G0", "G1", "H00"])
def test_c7_direction(table, acceptance_log, case):
    if case == "H00":
        target, params = _dt(table, Kind.F0), {"w_plus": 0.0, "w_minus": 0.0}
    else:
        w = float(case[1])
        target, params = _dt(table, Kind.G, w), {"w_plus": w, "alpha_minus": 0.0}
    ks = [ks_distance(_mc(Model.PNG, "CRITICAL_PNG", 4000, 99, t=t, **params), target) for t in (30.0, 100.0)]
    assert _report(acceptance_log, f"7 ({case})", ks[1] < ks[0], f"KS t=30 {ks[0]:.4f} > KS t=100 {ks[1]:.4f}")


# ---- 8 -------------------------------------------------------------------------


def test_c8a_lpp_universality(acceptance_log):
    s = _mc(Model.LPP, "LPP_TW", 4000, 2024, n=200, q=0.25)
    ok = abs(s.mean - GUE_MEAN) < 0.3
    assert _report(acceptance_log, "8a", ok, f"N=200 q=0.25 scaled mean {s.mean:.3f} within 0.3 of -1.771")


@_unattainable("the geometric-to-Poisson gap decays like 1/N; at N=40 it is 0.042, reaching 0.01 only near N=160")
def test_c8b_poissonization(acceptance_log):
    png = png_cdf_exact(2.0, 0.5, 0.5, 30).cdf
    lpp = lpp_cdf_exact(40, (2.0 / 40) ** 2, 0.5, 0.5, 30).cdf
    d = float(np.max(np.abs(png - lpp)))
    assert _report(acceptance_log, "8b", d < 0.01, f"sup |png(t=2) - lpp(N=40, sqrt q=2/40)| {d:.4f} < 0.01")


# ---- 9 -------------------------------------------------------------------------


def test_c9_chain_oracle(acceptance_log):
    cases = mismatches = i = 0
    while cases < 10_000:
        cfg = sample_png_config(1.5, 1.0, 1.0, 9, i)
        i += 1
        if cfg.size > 12:
            continue
        cases += 1
        mismatches += longest_weak_chain(cfg) != brute_force_chain(*png_points(cfg))[0]
    assert _report(acceptance_log, "9", mismatches == 0, f"{mismatches} mismatches in {cases} configurations of <= 12 points")


# ---- 10 ------------------------------------------------------------------------


def test_c10_determinism(acceptance_log):
    if not _MC_RUNS:
        pytest.skip("no Monte Carlo criterion ran in this session")
    bad = 0
    for (model, spec, samples, seed), first in _MC_RUNS.items():
        again = run_mc(model, spec, samples, seed, threads=1)
        same = np.array_equal(first.raw, again.raw) and (first.mean, first.variance) == (again.mean, again.variance)
        bad += not same
    n = len(_MC_RUNS)
    assert _report(acceptance_log, "10", bad == 0, f"{n - bad}/{n} Monte Carlo runs reproduced bitwise")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s", "-p", "no:cacheprovider"]))
