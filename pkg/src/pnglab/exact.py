"""Exact finite-size distributions from Toeplitz determinants.

The symbol is either ``exp(2t cos theta)`` (Poisson points) or
``(1 + sqrt(q) z)^N (1 + sqrt(q)/z)^N`` (geometric weights). Both are real
and even, so the monic orthogonal polynomials on the unit circle have real
coefficients and the Szego recursion runs entirely in real arithmetic::

    pi_{n+1}(z)  = z pi_n(z) + r_{n+1} pi*_n(z)
    pi*_{n+1}(z) = pi*_n(z) + r_{n+1} z pi_n(z)
    N_{n+1} = N_n (1 - r_{n+1}^2),   D_{n+1} = D_n N_n

The recursion is carried out in mpmath at a precision chosen from the
dynamic range of the symbol; a float64 Cholesky path is kept for
cross-checks.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .specfun import bessel_i_scaled

__all__ = [
    "WeightKind",
    "ToeplitzWeight",
    "OpEval",
    "ExactCdf",
    "PrecisionExhausted",
    "EnvelopeError",
    "toeplitz_logdet",
    "monic_op_eval",
    "dprime_ratio",
    "png_cdf_exact",
    "lpp_cdf_exact",
]

T_MAX = 12.0
# largest log(max symbol / min symbol) accepted; N = 40, q = 0.5 gives 141
LOG_RANGE_MAX = 150.0
LHOPITAL_TOL = 1e-8
CANCEL_FLAG = 1e-8


class PrecisionExhausted(ArithmeticError):
    """The Toeplitz section stopped being numerically positive definite."""

    def __init__(self, msg: str, l: int):
        super().__init__(msg)
        self.l = l


class EnvelopeError(ValueError):
    """Parameters outside the validated precision envelope."""


class WeightKind(str, enum.Enum):
    EXPONENTIAL = "EXPONENTIAL"
    GEOMETRIC = "GEOMETRIC"


@dataclass(frozen=True)
class ToeplitzWeight:
    kind: WeightKind
    t: float = 0.0
    n: int = 0
    q: float = 0.0

    @classmethod
    def exponential(cls, t: float) -> "ToeplitzWeight":
        if not t > 0:
            raise ValueError(f"t must be positive, got {t}")
        return cls(WeightKind.EXPONENTIAL, t=float(t))

    @classmethod
    def geometric(cls, n: int, q: float) -> "ToeplitzWeight":
        if n < 1 or not 0.0 < q < 1.0:
            raise ValueError(f"need n >= 1 and 0 < q < 1, got n={n}, q={q}")
        return cls(WeightKind.GEOMETRIC, n=int(n), q=float(q))

    @property
    def log_range(self) -> float:
        """log of max/min of the symbol on the circle."""
        if self.kind is WeightKind.EXPONENTIAL:
            return 4.0 * self.t
        sq = math.sqrt(self.q)
        return 2.0 * self.n * math.log((1.0 + sq) / (1.0 - sq))

    def working_dps(self) -> int:
        return 30 + int(2.0 * self.log_range / math.log(10.0))

    def coefficients(self, j_max: int, dps: int | None = None):
        """(c_hat_0..c_hat_jmax, s): c_j = c_hat_j exp(s), c_hat_0 <= 1.

        With ``dps`` the values are mpf at that precision, otherwise floats.
        """
        if self.kind is WeightKind.EXPONENTIAL:
            vals = bessel_i_scaled(j_max, 2.0 * self.t, dps=dps)
            return vals, 2.0 * self.t
        n = self.n
        with mpmath.workdps(dps or 30):
            sq = mpmath.sqrt(mpmath.mpf(self.q))
            raw = []
            for j in range(j_max + 1):
                if j > n:
                    raw.append(mpmath.mpf(0))
                    continue
                raw.append(
                    mpmath.fsum(mpmath.binomial(n, k) * mpmath.binomial(n, k + j) * sq ** (2 * k + j) for k in range(n - j + 1))
                )
            c0 = raw[0]
            vals = [c / c0 for c in raw]
            s = float(mpmath.log(c0))
        if dps is None:
            return np.array([float(v) for v in vals]), s
        return vals, s


@dataclass(frozen=True)
class OpEval:
    l: int
    z: float
    pi: float
    pi_prime: float
    pi_star: float


class _Szego:
    """Incremental Szego recursion with values at a few fixed points."""

    def __init__(self, w: ToeplitzWeight, l_max: int, points=(), dps: int | None = None):
        self.dps = dps or w.working_dps()
        self.ctx = mpmath.workdps(self.dps)
        with self.ctx:
            c, s = w.coefficients(l_max + 1, dps=self.dps)
            self.c = [mpmath.mpf(v) for v in c]
            self.s = s
            self.coef = [mpmath.mpf(1)]  # ascending powers, monic
            self.norm = self.c[0]  # N_0
            self.logdet = [mpmath.mpf(0)]
            self.l = 0
            self.z = [mpmath.mpf(p) for p in points]
            one, zero = mpmath.mpf(1), mpmath.mpf(0)
            # per point: pi, pi', pi*, pi*'
            self.vals = [[one, zero, one, zero] for _ in self.z]

    def step(self):
        with self.ctx:
            a = self.coef
            n = self.l
            acc = mpmath.fsum(a[k] * self.c[k + 1] for k in range(n + 1))
            r = -acc / self.norm
            # pi_{n+1} = z pi_n + r pi*_n, pi*_n has coefficients reversed
            new = [mpmath.mpf(0)] + a
            for k in range(n + 1):
                new[k] += r * a[n - k]
            self.coef = new
            self.logdet.append(self.logdet[-1] + mpmath.log(self.norm))
            self.norm = self.norm * (1 - r * r)
            if not self.norm > 0:
                raise PrecisionExhausted(f"Toeplitz section lost positivity at l = {n + 2}", n + 2)
            for z, v in zip(self.z, self.vals):
                p, dp, ps, dps_ = v
                v[0] = z * p + r * ps
                v[1] = p + z * dp + r * dps_
                v[2] = ps + r * z * p
                v[3] = dps_ + r * (p + z * dp)
            self.l = n + 1


def toeplitz_logdet(w: ToeplitzWeight, l_max: int, method: str = "levinson") -> np.ndarray:
    """``log D_l`` for ``l = 0..l_max`` (``log D_0 = 0``).

    ``method="levinson"`` runs the Szego recursion in extended precision;
    ``"cholesky"`` factors the float64 section row by row and raises
    :class:`PrecisionExhausted` naming the first ``l`` whose pivot is not
    positive.
    """
    if l_max < 0:
        raise ValueError("l_max must be non-negative")
    if method == "levinson":
        sz = _Szego(w, l_max)
        for _ in range(l_max):
            sz.step()
        with sz.ctx:
            return np.array([float(ld) + l * sz.s for l, ld in enumerate(sz.logdet)])
    if method != "cholesky":
        raise ValueError(f"unknown method {method!r}")
    c, s = w.coefficients(max(l_max - 1, 0))
    idx = np.abs(np.subtract.outer(np.arange(l_max), np.arange(l_max)))
    A = c[idx] if l_max else np.zeros((0, 0))
    L = np.zeros_like(A)
    out = np.zeros(l_max + 1)
    for k in range(l_max):
        piv = A[k, k] - L[k, :k] @ L[k, :k]
        if not piv > 0:
            raise PrecisionExhausted(f"Cholesky pivot {piv:.3e} at l = {k + 1}", k + 1)
        L[k, k] = math.sqrt(piv)
        L[k + 1 :, k] = (A[k + 1 :, k] - L[k + 1 :, :k] @ L[k, :k]) / L[k, k]
        out[k + 1] = out[k] + math.log(piv)
    return out + s * np.arange(l_max + 1)


def monic_op_eval(w: ToeplitzWeight, l: int, z: float) -> OpEval:
    """pi_l, pi_l' and pi*_l at a real point ``z``."""
    if l < 0:
        raise ValueError("l must be non-negative")
    sz = _Szego(w, l, points=(z,))
    for _ in range(l):
        sz.step()
    p, dp, ps, _ = sz.vals[0]
    return OpEval(l, float(z), float(p), float(dp), float(ps))


def _ratio(vals_p, vals_m, ap, am, l):
    """D'_l / D_l from the point values (mpf arithmetic)."""
    prod = ap * am
    if abs(prod - 1) >= LHOPITAL_TOL:
        return (vals_p[2] * vals_m[2] - prod * vals_p[0] * vals_m[0]) / (1 - prod)
    # alpha+ alpha- = 1: vals_m are at -1/alpha
    alpha = ap
    p_a, dp_a = vals_p[0], vals_p[1]
    p_b, dp_b = vals_m[0], vals_m[1]
    return (1 - l) * p_a * p_b - alpha * dp_a * p_b - p_a * dp_b / alpha


def _ratios(w: ToeplitzWeight, l_max: int, ap: float, am: float):
    """(logdet list, ratio list) for l = 0..l_max, in mpf at the working precision."""
    dps = w.working_dps()
    with mpmath.workdps(dps):
        AP, AM = mpmath.mpf(ap), mpmath.mpf(am)
        lhop = abs(ap * am - 1.0) < LHOPITAL_TOL
        zm = -1 / AP if lhop else -AM
        sz = _Szego(w, l_max, points=(-AP, zm), dps=dps)
        ratios = [_ratio(sz.vals[0], sz.vals[1], AP, AM, 0)]
        for l in range(1, l_max + 1):
            sz.step()
            ratios.append(_ratio(sz.vals[0], sz.vals[1], AP, AM, l))
        logdet = [ld + l * mpmath.mpf(sz.s) for l, ld in enumerate(sz.logdet)]
        return logdet, ratios, dps


def dprime_ratio(w: ToeplitzWeight, l: int, alpha_plus: float, alpha_minus: float) -> float:
    """``D'_l / D_l`` (``T'_l / T_l`` for the geometric weight)."""
    if l < 0:
        raise ValueError("l must be non-negative")
    _, ratios, _ = _ratios(w, l, alpha_plus, alpha_minus)
    return float(ratios[l])


@dataclass(frozen=True, eq=False)
class ExactCdf:
    """P(X <= l) for l = 0..l_max with per-l cancellation flags."""

    cdf: np.ndarray
    flags: np.ndarray
    params: dict

    @property
    def l(self) -> np.ndarray:
        return np.arange(len(self.cdf))

    def pmf(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.cdf]))

    def mean(self) -> float:
        """``sum_l l P(X = l)``; the mass beyond l_max is ignored."""
        return float(np.sum(self.l * self.pmf()))

    def to_csv(self, fh) -> None:
        fh.write("l,cdf,precision_flag\n")
        for l, p, f in zip(self.l, np.clip(self.cdf, 0.0, 1.0), self.flags):
            fh.write(f"{l},{float(p)!r},{int(bool(f))}\n")

    def manifest(self) -> str:
        d = dict(self.params)
        d["flagged"] = [int(i) for i in np.flatnonzero(self.flags)]
        return json.dumps(d, indent=2)


def _assemble(w, l_max, ap, am, log_pref, params) -> ExactCdf:
    logdet, ratios, dps = _ratios(w, l_max, ap, am)
    cdf = np.empty(l_max + 1)
    flags = np.zeros(l_max + 1, dtype=bool)
    with mpmath.workdps(dps):
        prod = mpmath.mpf(ap) * mpmath.mpf(am)
        pref = mpmath.mpf(log_pref)
        for l in range(l_max + 1):
            first = ratios[l]
            second = prod * ratios[l - 1] * mpmath.exp(logdet[l - 1] - logdet[l]) if l > 0 else mpmath.mpf(0)
            br = first - second
            scale = abs(first) + abs(second)
            if scale > 0 and abs(br) < CANCEL_FLAG * scale:
                flags[l] = True
            p = mpmath.exp(pref + logdet[l]) * br
            cdf[l] = float(p)
    if np.any(cdf < -1e-12):
        bad = int(np.flatnonzero(cdf < -1e-12)[0])
        raise PrecisionExhausted(f"negative probability {cdf[bad]:.3e} at l = {bad}", bad)
    params = dict(params, l_max=l_max, dps=dps, log_range=w.log_range)
    return ExactCdf(cdf, flags, params)


def png_cdf_exact(t: float, alpha_plus: float, alpha_minus: float, l_max: int) -> ExactCdf:
    """P(L(t) <= l) for the Poisson model with edge sources, l = 0..l_max."""
    if not 0 < t <= T_MAX:
        raise EnvelopeError(f"t = {t} outside the envelope (0, {T_MAX}]")
    if alpha_plus < 0 or alpha_minus < 0:
        raise ValueError("source intensities must be non-negative")
    if l_max < 0:
        raise ValueError("l_max must be non-negative")
    w = ToeplitzWeight.exponential(t)
    log_pref = -(alpha_plus + alpha_minus) * t - t * t
    params = {"model": "png", "t": t, "alpha_plus": alpha_plus, "alpha_minus": alpha_minus}
    return _assemble(w, l_max, alpha_plus, alpha_minus, log_pref, params)


def lpp_cdf_exact(n: int, q: float, alpha_plus: float, alpha_minus: float, l_max: int) -> ExactCdf:
    """P(X(N) <= l) for geometric last passage with boundary sources."""
    sq = math.sqrt(q)
    if alpha_plus < 0 or alpha_minus < 0 or alpha_plus * sq >= 1 or alpha_minus * sq >= 1:
        raise ValueError("need 0 <= alpha*sqrt(q) < 1")
    if l_max < 0:
        raise ValueError("l_max must be non-negative")
    w = ToeplitzWeight.geometric(n, q)
    if w.log_range > LOG_RANGE_MAX:
        raise EnvelopeError(f"symbol log-range {w.log_range:.1f} exceeds {LOG_RANGE_MAX}")
    log_pref = n * math.log1p(-alpha_plus * sq) + n * math.log1p(-alpha_minus * sq) + n * n * math.log1p(-q)
    params = {"model": "lpp", "n": n, "q": q, "alpha_plus": alpha_plus, "alpha_minus": alpha_minus}
    return _assemble(w, l_max, alpha_plus, alpha_minus, log_pref, params)
