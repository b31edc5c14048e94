"""Limiting distribution functions assembled from the Painleve table.

F_GUE, F_GOE, F_GOE^2, F_GSE, F_0, the transition families G(.; w) and
H(.; w+, w-), and the Gaussian laws Phi, Phi^2, all as
:class:`DistributionTable` objects on the table grid.
"""

from __future__ import annotations

import enum
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .painleve2 import PainleveTable, eval_painleve
from .specfun import RealGrid, airy_ai, integrate_sampled, normal_cdf
from .transition import EnvelopeError, _x_route, profile_signed, theta

__all__ = [
    "Kind",
    "DistributionTable",
    "MonotonicityError",
    "cdf_table",
    "cdf_at",
    "mean_variance",
    "density",
]

W_MAX_TABLE = 4.0
ANTISYM_TOL = 1e-3


class Kind(str, enum.Enum):
    GUE = "GUE"
    GOE = "GOE"
    GOE_SQUARED = "GOE_SQUARED"
    GSE = "GSE"
    F0 = "F0"
    G = "G"
    H = "H"
    NORMAL = "NORMAL"
    NORMAL_SQUARED = "NORMAL_SQUARED"


_ARITY = {Kind.G: 1, Kind.H: 2}


class MonotonicityError(ValueError):
    """A CDF decreases by more than round-off; the upstream solve is suspect."""


@dataclass(frozen=True, eq=False)
class DistributionTable:
    kind: Kind
    params: tuple
    grid: RealGrid
    cdf: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def clamped(self) -> np.ndarray:
        return np.clip(self.cdf, 0.0, 1.0)

    def problems(self, tail_tol: float = 1e-6, slack: float = 1e-12) -> list[str]:
        """Violated table invariants as messages; empty when all hold."""
        out = []
        c = self.cdf
        if np.any(np.diff(c) < -slack):
            out.append(f"decreases by up to {-np.min(np.diff(c)):.3e}")
        if c[0] >= tail_tol:
            out.append(f"left tail {c[0]:.3e} >= {tail_tol}")
        if c[-1] <= 1 - tail_tol:
            out.append(f"right tail {c[-1]:.3e} <= 1 - {tail_tol}")
        if np.any(c < -slack) or np.any(c > 1 + slack):
            out.append("values outside [0, 1]")
        return out

    def summary(self) -> dict:
        m, v = mean_variance(self)
        g = self.grid
        return {
            "kind": self.kind.value,
            "params": list(self.params),
            "mean": m,
            "variance": v,
            "grid": {"x_lo": g.x_lo, "x_hi": g.x_hi, "step": g.step},
        }

    def to_csv(self, fh, with_pdf: bool = False) -> None:
        c = self.clamped()
        if with_pdf:
            pdf = density(self)
            fh.write("x,cdf,pdf\n")
            for row in zip(self.x, c, pdf):
                fh.write(",".join(repr(float(r)) for r in row) + "\n")
        else:
            fh.write("x,cdf\n")
            for x, y in zip(self.x, c):
                fh.write(f"{float(x)!r},{float(y)!r}\n")

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)

    def csv_text(self, with_pdf: bool = False) -> str:
        buf = io.StringIO()
        self.to_csv(buf, with_pdf)
        return buf.getvalue()


def _check_params(kind: Kind, params) -> tuple:
    params = tuple(float(p) for p in params)
    need = _ARITY.get(kind, 0)
    if len(params) != need:
        raise ValueError(f"{kind.value} takes {need} parameter(s), got {len(params)}")
    return params


def _signed_exp(c, e):
    # c * exp(e) elementwise without overflowing the exponential alone
    with np.errstate(divide="ignore"):
        return np.sign(c) * np.exp(np.log(np.abs(c)) + e)


def _h_general(x, v, wp, wm, ab):
    ap, bp = ab(wp)
    am, bm = ab(wm)
    bb = _signed_exp(bp * bm, theta(x, wp) + theta(x, wm))
    aa = ap * am
    return aa - (aa - bb) * v / (2.0 * (wp + wm))


def _h_antisym(x, u, up, v, w, ab):
    # w >= 0; a(-w) = -beta(w) and b(-w) = -a(w) exp(-theta(w))
    a, be = ab(w)
    th = theta(x, w)
    am = -be
    aa = a * am
    b_w_am = -_signed_exp(be * be, th)  # b(w) a(-w)
    a_bm = -_signed_exp(a * a, -th)  # a(w) b(-w)
    y = (2 * u * u + x - 4 * w * w) * aa - (up + 2 * w * u) * b_w_am - (up - 2 * w * u) * a_bm
    return aa - y * v


def _assemble(kind: Kind, params, x, u, up, v, E, F, ab):
    gue = F * F
    if kind is Kind.GUE:
        return gue
    if kind is Kind.GOE:
        return F * E
    if kind is Kind.GOE_SQUARED:
        return (F * E) ** 2
    if kind is Kind.GSE:
        return 0.5 * F * (E + 1.0 / E)
    if kind is Kind.F0:
        y = x + 2 * up + 2 * u * u
        return (1.0 - y * v) * E**4 * gue
    if kind is Kind.NORMAL:
        return normal_cdf(x)
    if kind is Kind.NORMAL_SQUARED:
        return normal_cdf(x) ** 2
    if kind is Kind.G:
        return ab(params[0])[0] * gue
    if kind is Kind.H:
        wp, wm = params
        if abs(wp + wm) < ANTISYM_TOL:
            return _h_antisym(x, u, up, v, abs(wp - wm) / 2.0, ab) * gue
        # fixed argument order so that swapping w+ and w- is bitwise neutral
        lo, hi = min(wp, wm), max(wp, wm)
        return _h_general(x, v, hi, lo, ab) * gue
    raise ValueError(f"unknown kind {kind}")


def _check_envelope(kind, params, w_max):
    if kind in _ARITY and any(abs(p) > w_max for p in params):
        raise EnvelopeError(f"|w| > {w_max} is outside the accuracy envelope of the default grid")


def cdf_table(pt: PainleveTable, kind, params=()) -> DistributionTable:
    """Tabulate the distribution ``kind`` on the grid of ``pt``."""
    kind = Kind(kind)
    params = _check_params(kind, params)
    _check_envelope(kind, params, W_MAX_TABLE)
    cache = {}

    def ab(w):
        if w not in cache:
            p = profile_signed(pt, w)
            cache[w] = (p.a, p.beta)
        return cache[w]

    x = pt.x
    cdf = _assemble(kind, params, x, pt.u, pt.u_prime, pt.v, pt.E, pt.F, ab)
    cdf = np.asarray(cdf, dtype=float)
    cdf.flags.writeable = False
    return DistributionTable(kind, params, pt.grid, cdf)


def _airy_tail(x: float):
    """``(int_x^inf Ai, int_x^inf Ai^2, int_x^inf (s-x) Ai^2)``."""
    ai = lambda s: airy_ai(s)[0]  # noqa: E731
    t1 = quad(ai, x, np.inf, epsabs=0, epsrel=1e-12)[0]
    t2 = quad(lambda s: ai(s) ** 2, x, np.inf, epsabs=0, epsrel=1e-12)[0]
    t3 = quad(lambda s: (s - x) * ai(s) ** 2, x, np.inf, epsabs=0, epsrel=1e-12)[0]
    return t1, t2, t3


def _painleve_cols(pt: PainleveTable, xs: np.ndarray):
    """(u, u', v, E, F) at ``xs``; right of the table from the Airy tail."""
    n = len(xs)
    cols = [np.empty(n) for _ in range(5)]
    inside = xs <= pt.grid.x_hi
    if np.any(inside):
        vals = eval_painleve(pt, xs[inside])
        for c, val in zip(cols, vals):
            c[inside] = val
    for i in np.flatnonzero(~inside):
        xi = float(xs[i])
        ai, aip = airy_ai(xi)
        t1, t2, t3 = _airy_tail(xi)
        # u = -Ai there; the cubic terms are far below double precision
        vals = (-ai, -aip, -t2, math.exp(-0.5 * t1), math.exp(-0.5 * t3))
        for c, val in zip(cols, vals):
            c[i] = val
    return cols


def cdf_at(pt: PainleveTable, kind, params, xs) -> np.ndarray:
    """The CDF at ascending abscissae ``xs``, which may extend right of the table.

    G and H get their transition functions from the x-direction sweep at
    exactly these points.
    """
    kind = Kind(kind)
    params = _check_params(kind, params)
    _check_envelope(kind, params, 6.0)
    xs = np.asarray(xs, dtype=float)
    if np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be strictly increasing")
    if xs[0] < pt.grid.x_lo:
        raise ValueError(f"x = {xs[0]} left of the table")
    u, up, v, E, F = _painleve_cols(pt, xs)
    cache = {}

    def ab(w):
        if w not in cache:
            a, be = _x_route(pt, abs(w), xs)
            cache[w] = (a, be) if w >= 0 else (-be, -a)
        return cache[w]

    return np.asarray(_assemble(kind, params, xs, u, up, v, E, F, ab), dtype=float)


def mean_variance(dt: DistributionTable) -> tuple[float, float]:
    """Mean and variance by parts, ``int x dF = [xF] - int F``.

    The mass outside the grid is added back assuming it sits within a unit
    of the grid ends; on the default domain that correction is far below
    1e-8 for the Tracy-Widom family.
    """
    g = dt.grid
    x = g.x
    c = np.asarray(dt.cdf, dtype=float)
    lo, hi = x[0], x[-1]
    int_f = integrate_sampled(g, c)[0]
    int_xf = integrate_sampled(g, x * c)[0]
    m1 = hi * c[-1] - lo * c[0] - int_f
    m2 = hi * hi * c[-1] - lo * lo * c[0] - 2.0 * int_xf
    right = 1.0 - c[-1]
    left = c[0]
    m1 += right * (hi + 0.5) + left * (lo - 0.5)
    m2 += right * (hi + 0.5) ** 2 + left * (lo - 0.5) ** 2
    return float(m1), float(m2 - m1 * m1)


def density(dt: DistributionTable, clamp: float = 1e-9) -> np.ndarray:
    """Fourth-order finite-difference derivative of the CDF.

    Values in ``(-clamp, 0)`` are set to zero; anything more negative
    raises :class:`MonotonicityError`.
    """
    c = np.asarray(dt.cdf, dtype=float)
    h = dt.grid.step
    n = len(c)
    if n < 5:
        raise ValueError("density needs at least 5 grid points")
    d = np.empty(n)
    d[2:-2] = (c[:-4] - 8 * c[1:-3] + 8 * c[3:-1] - c[4:]) / (12 * h)
    # one-sided 5-point stencils at the two nodes nearest each end
    f = c[:5]
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    f = c[-5:]
    d[-1] = (25 * f[4] - 48 * f[3] + 36 * f[2] - 16 * f[1] + 3 * f[0]) / (12 * h)
    d[-2] = (3 * f[4] + 10 * f[3] - 18 * f[2] + 6 * f[1] - f[0]) / (12 * h)
    worst = d.min()
    if worst < -clamp:
        i = int(np.argmin(d))
        raise MonotonicityError(f"density {worst:.3e} at x = {dt.x[i]:.4f}")
    return np.maximum(d, 0.0)
