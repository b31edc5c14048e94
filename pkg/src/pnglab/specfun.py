"""Special functions and quadrature used throughout the package.

Airy Ai, the standard normal CDF, exponentially scaled modified Bessel
functions of integer order and a running Simpson antiderivative on a
uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as _sp

__all__ = [
    "RealGrid",
    "airy_ai",
    "airy_ai_array",
    "airy_ai_scaled",
    "normal_cdf",
    "bessel_i_scaled",
    "integrate_sampled",
]

AIRY_SWITCH = 8.0
_AIRY_DPS = 45

with mpmath.workdps(_AIRY_DPS + 5):
    _AI0 = 1 / (mpmath.cbrt(9) * mpmath.gamma(mpmath.mpf(2) / 3))
    _AIP0 = -1 / (mpmath.cbrt(3) * mpmath.gamma(mpmath.mpf(1) / 3))


@dataclass(frozen=True)
class RealGrid:
    """Uniform grid ``x_lo + i*step`` for ``i = 0..count-1``."""

    x_lo: float
    x_hi: float
    step: float

    def __post_init__(self):
        if not (self.x_lo < self.x_hi):
            raise ValueError(f"empty grid: x_lo={self.x_lo} >= x_hi={self.x_hi}")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        n = (self.x_hi - self.x_lo) / self.step
        if abs(n - round(n)) > 1e-6:
            raise ValueError("(x_hi - x_lo) must be an integer multiple of step")

    @property
    def count(self) -> int:
        return int(round((self.x_hi - self.x_lo) / self.step)) + 1

    @property
    def x(self) -> np.ndarray:
        # from the index, never by repeated addition
        return self.x_lo + np.arange(self.count) * self.step

    def index_of(self, x: float) -> int:
        """Index of the knot closest to ``x``."""
        return int(round((x - self.x_lo) / self.step))


# ---------------------------------------------------------------------------
# Airy function


def _airy_series(x: float) -> tuple[float, float]:
    # Maclaurin series; the two solutions grow like Bi, so the difference is
    # taken in extended precision to survive the cancellation up to |x| = 8.
    with mpmath.workdps(_AIRY_DPS):
        xm = mpmath.mpf(x)
        x2 = xm * xm
        x3 = x2 * xm
        f = fk = mpmath.mpf(1)
        g = gk = xm
        fp = mpmath.mpf(0)
        gp = mpmath.mpf(1)
        eps = mpmath.mpf(10) ** (-_AIRY_DPS)
        k = 1
        while True:
            fpk = fk * x2 / (3 * k - 1)
            gpk = gk * x2 / (3 * k)
            fk = fk * x3 / ((3 * k - 1) * (3 * k))
            gk = gk * x3 / ((3 * k) * (3 * k + 1))
            f += fk
            g += gk
            fp += fpk
            gp += gpk
            if k > 5 and abs(fk) + abs(gk) + abs(fpk) + abs(gpk) < eps * (abs(f) + abs(g) + abs(fp) + abs(gp)):
                break
            k += 1
        ai = _AI0 * f + _AIP0 * g
        aip = _AI0 * fp + _AIP0 * gp
        return float(ai), float(aip)


def _airy_coeffs(zeta: float) -> tuple[list[float], list[float]]:
    """Asymptotic coefficients u_k, v_k up to the smallest term at ``zeta``."""
    u = [1.0]
    v = [1.0]
    k = 1
    while True:
        uk = u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        vk = -(6 * k + 1) / (6 * k - 1) * uk
        if abs(uk) / zeta**k > abs(u[-1]) / zeta ** (k - 1) or abs(uk) / zeta**k < 1e-18:
            break
        u.append(uk)
        v.append(vk)
        k += 1
    return u, v


def _airy_asymptotic(x: float) -> tuple[float, float]:
    ax = abs(x)
    zeta = 2.0 / 3.0 * ax**1.5
    u, v = _airy_coeffs(zeta)
    if x > 0:
        su = sum((-1) ** k * uk / zeta**k for k, uk in enumerate(u))
        sv = sum((-1) ** k * vk / zeta**k for k, vk in enumerate(v))
        pre = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
        return pre * su / ax**0.25, -pre * sv * ax**0.25
    # oscillatory side
    pu = sum((-1) ** k * u[2 * k] / zeta ** (2 * k) for k in range((len(u) + 1) // 2))
    qu = sum((-1) ** k * u[2 * k + 1] / zeta ** (2 * k + 1) for k in range(len(u) // 2))
    pv = sum((-1) ** k * v[2 * k] / zeta ** (2 * k) for k in range((len(v) + 1) // 2))
    qv = sum((-1) ** k * v[2 * k + 1] / zeta ** (2 * k + 1) for k in range(len(v) // 2))
    c = math.cos(zeta - math.pi / 4)
    s = math.sin(zeta - math.pi / 4)
    sp = math.sqrt(math.pi)
    ai = (c * pu + s * qu) / (sp * ax**0.25)
    aip = ax**0.25 * (s * pv - c * qv) / sp
    return ai, aip


def airy_ai(x: float) -> tuple[float, float]:
    """Return ``(Ai(x), Ai'(x))``.

    Maclaurin series (extended precision) for ``|x| <= 8``; the optimally
    truncated asymptotic expansion outside. Relative error below 1e-12 for
    ``|x| <= 12`` away from the zeros on the negative axis.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("airy_ai requires a finite argument")
    if abs(x) <= AIRY_SWITCH:
        return _airy_series(x)
    return _airy_asymptotic(x)


def airy_ai_scaled(x: float) -> tuple[float, float]:
    """``(exp(zeta) Ai(x), zeta)`` for ``x > 0`` with ``zeta = 2/3 x^{3/2}``.

    Lets callers multiply Ai by large exponentials without overflow.
    """
    x = float(x)
    if not x > 0:
        raise ValueError("airy_ai_scaled needs x > 0")
    zeta = 2.0 / 3.0 * x**1.5
    if x <= AIRY_SWITCH:
        return _airy_series(x)[0] * math.exp(zeta), zeta
    u, _ = _airy_coeffs(zeta)
    su = sum((-1) ** k * uk / zeta**k for k, uk in enumerate(u))
    return su / (2.0 * math.sqrt(math.pi) * x**0.25), zeta


def airy_ai_array(x) -> tuple[np.ndarray, np.ndarray]:
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([airy_ai(xi) for xi in xs.ravel()]).reshape(xs.shape + (2,))
    return out[..., 0], out[..., 1]


# ---------------------------------------------------------------------------


def normal_cdf(x):
    """Standard normal distribution function; accepts scalars or arrays."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))
    return _sp.ndtr(np.asarray(x, dtype=float))


def bessel_i_scaled(n_max: int, z, dps: int | None = None):
    """``exp(-z) * I_k(z)`` for ``k = 0..n_max`` by Miller's backward recurrence.

    The unnormalised sequence is fixed by ``I_0 + 2*sum_k I_k = exp(z)``.
    With ``dps`` set, the recurrence runs in mpmath at that many digits and a
    list of ``mpf`` is returned; otherwise a float64 array.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if dps is None:
        z = float(z)
        if not z > 0:
            raise ValueError(f"bessel_i_scaled needs z > 0, got {z}")
        return np.array(_miller(n_max, z, 1.0, 16), dtype=float)
    with mpmath.workdps(dps):
        zm = mpmath.mpf(z)
        if not zm > 0:
            raise ValueError(f"bessel_i_scaled needs z > 0, got {z}")
        return _miller(n_max, zm, mpmath.mpf(1), dps)


def _miller(n_max, z, one, digits):
    big = max(n_max, float(z), 1.0)
    start = int(max(n_max, math.ceil(float(z)))) + 20 + int(4 * math.sqrt(digits * big))
    floating = digits <= 16
    vals = [0 * one] * (n_max + 1)
    i_next = 0 * one
    i_k = one * (1e-30 if floating else 1)
    tail = i_k  # running sum of I_k, k >= 1
    for k in range(start, 0, -1):
        i_prev = i_next + (2 * k / z) * i_k
        i_next, i_k = i_k, i_prev
        if k - 1 <= n_max:
            vals[k - 1] = i_k
        if k - 1 >= 1:
            tail += i_k
        if floating and abs(i_k) > 1e200:
            i_k /= 1e200
            i_next /= 1e200
            tail /= 1e200
            vals = [v / 1e200 for v in vals]
    norm = vals[0] + 2 * tail
    return [v / norm for v in vals]


def integrate_sampled(grid: RealGrid, values) -> np.ndarray:
    """Running integral ``out[i] = int_{x_i}^{x_hi} values``.

    Composite Simpson pairs anchored at ``x_hi``; nodes an odd number of
    intervals away pick up a single-interval three-point rule (exact for
    quadratics). A two-point grid falls back to the trapezoid.
    """
    f = np.asarray(values, dtype=float)
    n = grid.count
    if f.shape != (n,):
        raise ValueError(f"values has shape {f.shape}, grid expects ({n},)")
    h = grid.step
    out = np.zeros(n)
    if n == 2:
        out[0] = 0.5 * h * (f[0] + f[1])
        return out
    # even offsets from the right end: Simpson pairs
    idx = np.arange(n - 1, -1, -2)  # n-1, n-3, ...
    if len(idx) > 1:
        a, m, b = f[idx[1:]], f[idx[1:] + 1], f[idx[:-1]]
        out[idx[1:]] = np.cumsum(h / 3.0 * (a + 4.0 * m + b))
    # odd offsets: one interval left of an even-offset node
    odd = np.arange(n - 2, -1, -2)
    right = odd + 1
    # int_{x_i}^{x_{i+1}} f = h/12 (5 f_i + 8 f_{i+1} - f_{i+2}) when i+2 exists
    has2 = odd + 2 <= n - 1
    piece = np.empty(len(odd))
    o = odd[has2]
    piece[has2] = h / 12.0 * (5.0 * f[o] + 8.0 * f[o + 1] - f[o + 2])
    o = odd[~has2]
    # mirrored form using the left neighbour
    piece[~has2] = h / 12.0 * (-f[o - 1] + 8.0 * f[o] + 5.0 * f[o + 1])
    out[odd] = out[right] + piece
    return out
