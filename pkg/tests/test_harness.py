import json
import math

import numpy as np
import pytest
from scipy.stats import norm

from pnglab.distributions import Kind, cdf_table
from pnglab.harness import (
    EcdfSummary,
    Model,
    ScalingSpec,
    compare_report,
    default_threads,
    ks_distance,
    lpp_scaling_params,
    raw_samples,
    run_mc,
)
from pnglab.specfun import normal_cdf


def _summary(values):
    v = np.sort(np.asarray(values, dtype=float))
    spec = ScalingSpec.make("PNG_TW", t=1.0)
    return EcdfSummary(v, v, len(v), float(v.mean()), float(v.var()), float(v.mean()), spec, 0)


def test_lpp_scaling_constants():
    s = lpp_scaling_params(0.25)
    assert s["mu"] == pytest.approx(2.0, rel=1e-15)
    assert s["sigma"] == pytest.approx(2 ** (-1 / 3) * 1.5 ** (1 / 3) / 0.5, rel=1e-14)
    assert s["sigma"] == pytest.approx(1.81712, abs=1e-5)
    assert lpp_scaling_params(0.25, 1.5)["eta"] > s["mu"]
    assert lpp_scaling_params(0.25, 0.8)["eta"] is None
    with pytest.raises(ValueError):
        lpp_scaling_params(0.25, 2.0)


def test_ks_inverse_cdf_samples(table):
    gue = cdf_table(table, Kind.GUE)
    n = 10_000
    u = np.random.default_rng(12).random(n)
    c = gue.clamped()
    keep = np.concatenate([[True], np.diff(c) > 0])
    xs = np.interp(u, c[keep], gue.x[keep])
    assert ks_distance(_summary(xs), gue) < 1.63 / math.sqrt(n)


def test_ks_single_sample():
    for x in (-0.7, 0.0, 1.3):
        want = max(normal_cdf(x), 1 - normal_cdf(x))
        assert ks_distance(_summary([x]), normal_cdf) == pytest.approx(want, abs=1e-15)


def test_ks_shifted():
    n = 10_000
    xs = norm.ppf((np.arange(n) + 0.5) / n) + 0.5
    want = 2 * normal_cdf(0.25) - 1
    assert ks_distance(_summary(xs), normal_cdf) == pytest.approx(want, abs=0.02)
    assert want == pytest.approx(0.19, abs=0.01)


def test_ks_table_and_callable_agree(table):
    nt = cdf_table(table, Kind.NORMAL)
    xs = np.random.default_rng(3).normal(size=2000)
    assert ks_distance(_summary(xs), nt) == pytest.approx(ks_distance(_summary(xs), normal_cdf), abs=1e-5)


def test_scaling_maps():
    spec = ScalingSpec.make("PNG_GAUSS", t=50, alpha_plus=2.0)
    shift, sc = spec.affine()
    assert shift == pytest.approx(2.5 * 50) and sc == pytest.approx(math.sqrt(1.5 * 50))
    raw = np.arange(0, 300)
    assert np.all(np.diff(spec.scale(raw)) > 0)
    crit = ScalingSpec.make("CRITICAL_PNG", t=27, w_plus=0.6, alpha_minus=0.0)
    assert crit.alphas() == pytest.approx((1 - 2 * 0.6 / 3, 0.0))
    lpp = ScalingSpec.make("CRITICAL_LPP", n=8, q=0.25, w_plus=0.0, w_minus=0.0)
    assert lpp.alphas() == (1.0, 1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        ScalingSpec.make("PNG_TW")
    with pytest.raises(ValueError):
        ScalingSpec.make("PNG_GAUSS", t=10, alpha_plus=0.5)
    with pytest.raises(ValueError):
        ScalingSpec.make("LPP_TW", n=4.5, q=0.25)
    with pytest.raises(ValueError):
        ScalingSpec.make("LPP_GAUSS", n=4, q=0.25, alpha_plus=2.5)
    with pytest.raises(ValueError):
        run_mc(Model.LPP, ScalingSpec.make("PNG_TW", t=2), 200, 1)
    with pytest.raises(ValueError):
        run_mc(Model.PNG, ScalingSpec.make("PNG_TW", t=2), 50, 1)


def test_mean_consistent_under_affine_map():
    spec = ScalingSpec.make("PNG_TW", t=6.0)
    s = run_mc(Model.PNG, spec, 500, seed=8)
    shift, sc = spec.affine()
    assert s.mean == pytest.approx((s.raw_mean - shift) / sc, abs=1e-12)


def test_thread_count_does_not_matter():
    spec = ScalingSpec.make("LPP_TW", n=12, q=0.3)
    one = raw_samples(spec, 400, seed=5, threads=1)
    four = raw_samples(spec, 400, seed=5, threads=4)
    assert np.array_equal(one, four)


def test_default_threads(monkeypatch):
    monkeypatch.setenv("PNGLAB_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.delenv("PNGLAB_THREADS")
    assert default_threads() >= 1


def test_report_reproducible(table):
    spec = ScalingSpec.make("PNG_TW", t=3.0)
    gue = cdf_table(table, Kind.GUE)
    a = compare_report(Model.PNG, spec, 300, 77, gue)
    b = compare_report(Model.PNG, spec, 300, 77, gue, threads=2)
    assert a.to_json(timing=False) == b.to_json(timing=False)
    rec = json.loads(a.to_json())
    assert rec["exact_available"] and rec["exact_ks"] < 0.1
    assert "runtime_ms" in rec
    rows = a.to_csv().splitlines()
    assert rows[0] == "sample_index,raw,scaled"
    i, raw, scaled = rows[1].split(",")
    assert float(scaled) == pytest.approx(spec.scale(int(raw)))
