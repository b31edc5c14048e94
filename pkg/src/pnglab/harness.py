"""Monte Carlo runs, scaling maps, empirical CDFs and comparison reports."""

from __future__ import annotations

import enum
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import exact
from .distributions import DistributionTable, mean_variance
from .sampler import lpp_last_passage, longest_weak_chain, sample_lpp, sample_png_config

__all__ = [
    "Model",
    "Regime",
    "ScalingSpec",
    "EcdfSummary",
    "CompareReport",
    "lpp_scaling_params",
    "raw_samples",
    "run_mc",
    "ks_distance",
    "compare_report",
    "default_threads",
]


class Model(str, enum.Enum):
    PNG = "PNG"
    LPP = "LPP"


class Regime(str, enum.Enum):
    PNG_TW = "PNG_TW"
    PNG_GAUSS = "PNG_GAUSS"
    LPP_TW = "LPP_TW"
    LPP_GAUSS = "LPP_GAUSS"
    CRITICAL_PNG = "CRITICAL_PNG"
    CRITICAL_LPP = "CRITICAL_LPP"


_MODEL_OF = {
    Regime.PNG_TW: Model.PNG,
    Regime.PNG_GAUSS: Model.PNG,
    Regime.CRITICAL_PNG: Model.PNG,
    Regime.LPP_TW: Model.LPP,
    Regime.LPP_GAUSS: Model.LPP,
    Regime.CRITICAL_LPP: Model.LPP,
}


def lpp_scaling_params(q: float, alpha: float | None = None) -> dict:
    """mu, sigma and, for 1 < alpha < 1/sqrt(q), eta and rho (else None)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    sq = math.sqrt(q)
    mu = 2.0 * sq / (1.0 - sq)
    sigma = q ** (1.0 / 6.0) * (1.0 + sq) ** (1.0 / 3.0) / (1.0 - sq)
    out = {"mu": mu, "sigma": sigma, "eta": None, "rho": None}
    if alpha is None:
        return out
    if alpha * sq >= 1.0:
        raise ValueError(f"alpha = {alpha} must be below 1/sqrt(q) = {1 / sq}")
    if alpha > 1.0:
        den = (1.0 - sq * alpha) * (1.0 - sq / alpha)
        out["eta"] = sq * (alpha + 1.0 / alpha - 2.0 * sq) / den
        out["rho"] = sq * math.sqrt(alpha - 1.0 / alpha) * math.sqrt(1.0 / sq - sq) / den
    return out


@dataclass(frozen=True)
class ScalingSpec:
    """A scaling regime and its parameters.

    PNG regimes use ``t``; LPP regimes use ``n`` and ``q``. Sources are
    ``alpha_plus``/``alpha_minus``; critical regimes take ``w_plus`` and
    ``w_minus`` instead, either of which may be replaced by a fixed alpha.
    """

    regime: Regime
    params: tuple = ()  # sorted (name, value) pairs, hashable

    @classmethod
    def make(cls, regime, **params) -> "ScalingSpec":
        spec = cls(Regime(regime), tuple(sorted((k, float(v)) for k, v in params.items())))
        spec.validate()
        return spec

    @property
    def p(self) -> dict:
        return dict(self.params)

    @property
    def model(self) -> Model:
        return _MODEL_OF[self.regime]

    def validate(self) -> None:
        p = self.p
        need = {Model.PNG: ("t",), Model.LPP: ("n", "q")}[self.model]
        for k in need:
            if k not in p:
                raise ValueError(f"{self.regime.value} needs parameter {k!r}")
        if self.model is Model.LPP:
            if p["n"] < 1 or p["n"] != int(p["n"]):
                raise ValueError("n must be a positive integer")
            if not 0.0 < p["q"] < 1.0:
                raise ValueError("q must lie in (0, 1)")
        elif not p["t"] > 0:
            raise ValueError("t must be positive")
        ap, am = self.alphas()
        if ap < 0 or am < 0:
            raise ValueError(f"source strengths must be non-negative, got {ap}, {am}")
        if self.model is Model.LPP:
            sq = math.sqrt(p["q"])
            if ap * sq >= 1.0 or am * sq >= 1.0:
                raise ValueError("need alpha*sqrt(q) < 1")
        if self.regime in (Regime.PNG_GAUSS, Regime.LPP_GAUSS) and max(ap, am) <= 1.0:
            raise ValueError("Gaussian regimes need max(alpha+, alpha-) > 1")

    def _critical_scale(self) -> float:
        p = self.p
        if self.regime is Regime.CRITICAL_PNG:
            return p["t"] ** (1.0 / 3.0)
        return lpp_scaling_params(p["q"])["sigma"] * p["n"] ** (1.0 / 3.0)

    def alphas(self) -> tuple[float, float]:
        p = self.p
        out = []
        for side in ("plus", "minus"):
            a = p.get(f"alpha_{side}")
            if a is None and f"w_{side}" in p and self.regime in (Regime.CRITICAL_PNG, Regime.CRITICAL_LPP):
                a = 1.0 - 2.0 * p[f"w_{side}"] / self._critical_scale()
            out.append(0.0 if a is None else a)
        return out[0], out[1]

    def affine(self) -> tuple[float, float]:
        """(shift, scale) with scaled = (raw - shift) / scale."""
        p = self.p
        ap, am = self.alphas()
        r = self.regime
        if r in (Regime.PNG_TW, Regime.CRITICAL_PNG):
            t = p["t"]
            return 2.0 * t, t ** (1.0 / 3.0)
        if r is Regime.PNG_GAUSS:
            t, a = p["t"], max(ap, am)
            return (a + 1.0 / a) * t, math.sqrt(a - 1.0 / a) * math.sqrt(t)
        n, q = p["n"], p["q"]
        if r in (Regime.LPP_TW, Regime.CRITICAL_LPP):
            s = lpp_scaling_params(q)
            return s["mu"] * n, s["sigma"] * n ** (1.0 / 3.0)
        s = lpp_scaling_params(q, max(ap, am))
        return s["eta"] * n, s["rho"] * math.sqrt(n)

    def scale(self, raw):
        shift, sc = self.affine()
        return (np.asarray(raw, dtype=float) - shift) / sc


@dataclass(frozen=True, eq=False)
class EcdfSummary:
    samples: np.ndarray  # sorted scaled values
    raw: np.ndarray  # raw values in sample-index order
    count: int
    mean: float
    variance: float
    raw_mean: float
    spec: ScalingSpec
    seed: int

    def ecdf(self, x) -> np.ndarray:
        return np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right") / self.count

    def samples_csv(self) -> str:
        buf = io.StringIO()
        buf.write("sample_index,raw,scaled\n")
        shift, sc = self.spec.affine()
        for i, r in enumerate(self.raw):
            buf.write(f"{i},{int(r)},{float((r - shift) / sc)!r}\n")
        return buf.getvalue()


def default_threads() -> int:
    env = os.environ.get("PNGLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _one_sample(spec: ScalingSpec, seed: int, index: int) -> int:
    p = spec.p
    ap, am = spec.alphas()
    if spec.model is Model.PNG:
        return longest_weak_chain(sample_png_config(p["t"], ap, am, seed, index))
    return lpp_last_passage(sample_lpp(int(p["n"]), p["q"], ap, am, seed, index))


def raw_samples(spec: ScalingSpec, samples: int, seed: int, threads: int | None = None) -> np.ndarray:
    """Raw L(t) or X(N) for sample indices 0..samples-1.

    Work is split into contiguous index blocks; each result lands at its
    own index, so the output does not depend on the number of workers.
    """
    spec.validate()
    threads = threads or default_threads()
    out = np.empty(samples, dtype=np.int64)

    def block(lo, hi):
        for i in range(lo, hi):
            out[i] = _one_sample(spec, seed, i)

    if threads <= 1 or samples < 2 * threads:
        block(0, samples)
        return out
    edges = np.linspace(0, samples, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        futs = [ex.submit(block, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
        for f in futs:
            f.result()
    return out


def run_mc(model, spec: ScalingSpec, samples: int, seed: int, threads: int | None = None) -> EcdfSummary:
    model = Model(model)
    if model is not spec.model:
        raise ValueError(f"regime {spec.regime.value} does not belong to model {model.value}")
    if samples < 100:
        raise ValueError("run_mc needs at least 100 samples")
    raw = raw_samples(spec, samples, seed, threads)
    scaled = np.sort(spec.scale(raw))
    return EcdfSummary(
        samples=scaled,
        raw=raw,
        count=samples,
        mean=float(scaled.mean()),
        variance=float(scaled.var()),
        raw_mean=float(raw.mean()),
        spec=spec,
        seed=seed,
    )


def _cdf_interp(dt: DistributionTable, x: np.ndarray) -> np.ndarray:
    c = dt.clamped()
    return np.interp(x, dt.x, c, left=0.0, right=1.0)


def ks_distance(ecdf: EcdfSummary, dt) -> float:
    """sup |ECDF - CDF| over the sample points, on both sides of each jump.

    ``dt`` is a :class:`DistributionTable` (linear interpolation on its grid,
    0 and 1 beyond it) or any vectorised CDF callable.
    """
    xs = ecdf.samples
    n = ecdf.count
    uniq, first = np.unique(xs, return_index=True)
    before = first / n
    after = np.append(first[1:], n) / n
    f = dt(uniq) if callable(dt) else _cdf_interp(dt, uniq)
    return float(max(np.max(np.abs(after - f)), np.max(np.abs(f - before))))


@dataclass(frozen=True, eq=False)
class CompareReport:
    model: str
    regime: str
    params: dict
    n: int
    seed: int
    mean: float
    variance: float
    raw_mean: float
    ks: float
    target: str
    target_mean: float
    target_variance: float
    exact_available: bool
    exact_ks: float | None
    runtime_ms: float
    summary: EcdfSummary = field(repr=False)

    @property
    def mean_delta(self) -> float:
        return self.mean - self.target_mean

    @property
    def variance_delta(self) -> float:
        return self.variance - self.target_variance

    def record(self, timing: bool = True) -> dict:
        d = {
            "model": self.model,
            "regime": self.regime,
            "params": self.params,
            "n": self.n,
            "seed": self.seed,
            "mean": self.mean,
            "variance": self.variance,
            "raw_mean": self.raw_mean,
            "ks": self.ks,
            "target": self.target,
            "mean_delta": self.mean_delta,
            "variance_delta": self.variance_delta,
            "exact_available": self.exact_available,
            "exact_ks": self.exact_ks,
        }
        if timing:
            d["runtime_ms"] = self.runtime_ms
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.record(timing), indent=2)

    def to_csv(self) -> str:
        return self.summary.samples_csv()


def _exact_cdf(spec: ScalingSpec, l_max: int):
    """Exact law of the raw variable when inside the exact envelope, else None."""
    p = spec.p
    ap, am = spec.alphas()
    try:
        if spec.model is Model.PNG:
            return exact.png_cdf_exact(p["t"], ap, am, l_max).cdf
        return exact.lpp_cdf_exact(int(p["n"]), p["q"], ap, am, l_max).cdf
    except exact.EnvelopeError:
        return None


def compare_report(model, spec: ScalingSpec, samples: int, seed: int, target: DistributionTable, threads=None) -> CompareReport:
    t0 = time.perf_counter()
    summ = run_mc(model, spec, samples, seed, threads)
    ks = ks_distance(summ, target)
    tm, tv = mean_variance(target)
    ex = _exact_cdf(spec, int(summ.raw.max()) + 1)
    exact_ks = None
    if ex is not None:
        ls = np.arange(len(ex))
        emp = np.searchsorted(np.sort(summ.raw), ls, side="right") / samples
        exact_ks = float(np.max(np.abs(emp - ex)))
    runtime = (time.perf_counter() - t0) * 1e3
    return CompareReport(
        model=Model(model).value,
        regime=spec.regime.value,
        params=spec.p,
        n=samples,
        seed=seed,
        mean=summ.mean,
        variance=summ.variance,
        raw_mean=summ.raw_mean,
        ks=ks,
        target=target.kind.value + ("" if not target.params else str(list(target.params))),
        target_mean=tm,
        target_variance=tv,
        exact_available=ex is not None,
        exact_ks=exact_ks,
        runtime_ms=runtime,
        summary=summ,
    )
