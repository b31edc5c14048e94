"""The transition functions a(x, w), b(x, w).

Both are obtained from linear ODEs driven by the Hastings-McLeod solution,
either in the x direction (a rightward sweep from the left asymptotic
regime, normalised by ``a -> 1`` on the right) or in the w direction (a
Taylor series about ``a = E^2``, ``b = -E^2`` at ``w = 0``).
Here ``theta(x, w) = 8w^3/3 - 2xw``. Internally ``b`` is carried as
``beta = b * exp(-theta)`` so that neither exponential growth nor the
symmetry ``a(x, -w) = -beta(x, w)`` ever forms an overflowing product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

from .painleve2 import PainleveTable, _left_boundary, eval_painleve
from .specfun import RealGrid, airy_ai_scaled

__all__ = [
    "TransitionProfile",
    "EnvelopeError",
    "theta",
    "ab_at",
    "ab_profile_x",
    "profile_signed",
    "erf_limit_check",
    "a_beyond",
]

W_ENVELOPE = 6.0
RTOL = 1e-10
ATOL = 1e-14
LEFT_RUNUP = 10.0
# furthest right the x-direction sweep may start
EXTENDED_REACH = 400.0
# largest theta at which the w-direction series keeps ~1e-6 accuracy
THETA_W_MAX = 14.0


class EnvelopeError(ValueError):
    """Parameter outside the documented accuracy envelope."""


def theta(x, w):
    return 8.0 / 3.0 * w**3 - 2.0 * x * w


@dataclass(frozen=True, eq=False)
class TransitionProfile:
    """a(x, w) and b(x, w) on a grid; ``beta = b * exp(-theta)``."""

    w: float
    grid: RealGrid
    a: np.ndarray
    beta: np.ndarray

    @property
    def b(self) -> np.ndarray:
        return self.beta * np.exp(theta(self.grid.x, self.w))

    def to_csv(self, fh) -> None:
        fh.write("x,a,b\n")
        for x, a, b in zip(self.grid.x, self.a, self.b):
            fh.write(f"{float(x)!r},{float(a)!r},{float(b)!r}\n")


def _u_scalar(table: PainleveTable):
    """Return ``f(x) -> (u, log_scale)`` with ``u(x) = f[0] * exp(-f[1])``.

    Inside the table the cubic Hermite interpolant (scale 0); right of it
    ``-Ai``, left of it the large-negative-x expansion.
    """
    g = table.grid
    u, up = table.u, table.u_prime
    x_lo, h, n = g.x_lo, g.step, g.count

    def f(x):
        if x > g.x_hi:
            s, zeta = airy_ai_scaled(x)
            return -s, zeta
        if x < x_lo:
            return _left_boundary(x), 0.0
        s = (x - x_lo) / h
        i = min(max(int(s), 0), n - 2)
        t = s - i
        t2 = t * t
        t3 = t2 * t
        return (
            (2 * t3 - 3 * t2 + 1) * u[i]
            + (t3 - 2 * t2 + t) * h * up[i]
            + (-2 * t3 + 3 * t2) * u[i + 1]
            + (t3 - t2) * h * up[i + 1]
        ), 0.0

    return f


def _start_point(w: float, x_needed: float) -> float:
    """First x right of ``x_needed`` where the driving term exp(-theta) Ai is negligible.

    ``-2/3 x^{3/2} + 2wx - 8w^3/3`` peaks (at zero) at ``x = 4w^2``; start
    where it has fallen below -60 on the decreasing side.
    """
    x = max(x_needed + 4.0, 8.0)
    if w <= 0:
        return x
    x = max(x, 4.0 * w * w)
    while -2.0 / 3.0 * x**1.5 + 2.0 * w * x - 8.0 / 3.0 * w**3 > -60.0:
        x += 1.0
    return x


def _mul_exp(c, e):
    # c * exp(e) without forming exp(e) on its own
    if c == 0.0:
        return 0.0
    return math.copysign(math.exp(math.log(abs(c)) + e), c)


def _x_sweep(ufun, w, x_from, x_to, y0, x_eval, atol=ATOL):
    c = 8.0 / 3.0 * w**3

    def rhs(x, y):
        u, ls = ufun(x)
        th = c - 2.0 * x * w
        return [_mul_exp(u * y[1], th - ls), _mul_exp(u * y[0], -th - ls)]

    sol = solve_ivp(
        rhs, (x_from, x_to), y0, method="DOP853", rtol=RTOL, atol=atol, t_eval=x_eval,
    )
    if not sol.success:
        raise RuntimeError(f"x-direction integration failed: {sol.message}")
    return sol.y


def _x_route(table: PainleveTable, w: float, xs: np.ndarray):
    """(a, beta) at ascending abscissae ``xs`` for ``w >= 0``.

    The wanted solution is the one that decays as x -> -inf, so it is swept
    rightward from well left of the table (the start direction is forgotten
    at rate exp(-2 int |u|)) up to the point where the Airy forcing has died
    out, and then normalised by ``a -> 1``. Both components keep one sign,
    so the sweep runs under a pure relative tolerance.
    """
    ufun = _u_scalar(table)
    x0 = table.grid.x_lo - LEFT_RUNUP
    x_end = _start_point(w, float(xs[-1]))
    u0 = _left_boundary(x0)
    lam = -w + math.sqrt(w * w + u0 * u0)
    th0 = theta(x0, w)
    lift = max(0.0, th0 - 600.0)
    # eigen-direction of the frozen-coefficient system: u b = lam a
    y0 = [math.exp(lift), lam / u0 * math.exp(lift - th0)]
    ev = np.concatenate([xs, [x_end]])
    y = _x_sweep(ufun, w, x0, x_end, y0, ev, atol=1e-300)
    a_end, beta_end = y[0][-1], y[1][-1]
    if abs(beta_end / a_end + 1.0) > 1e-6:
        raise RuntimeError(f"x-route right-tail mismatch: b/a e^-theta = {beta_end / a_end}")
    return y[0][:-1] / a_end, y[1][:-1] / a_end


def _w_dps(x, u, up, w) -> int:
    # crude bound on the largest Taylor term relative to the result
    aw = abs(w)
    grow = 8.0 / 3.0 * aw**3 + (2.0 * abs(x) + 2.0 * u * u + 2.0 * abs(up)) * aw + 2.0 * abs(u) * aw * aw
    return 30 + int(grow / math.log(10.0))


def _w_taylor(x: float, u: float, up: float, e2: float, w: float):
    """Sum the Taylor series of (a, b) about w = 0 at one abscissa.

    In w the system has polynomial coefficients, so a and b are entire;
    the coefficients obey a four-term recurrence::

        (k+1) a_{k+1} = 2u^2 a_k - 2u' b_k - 4u b_{k-1}
        (k+1) b_{k+1} = 2u' a_k - 4u a_{k-1} - (2x + 2u^2) b_k + 8 b_{k-2}

    Summed in mpmath at a precision chosen from the growth of the terms.
    """
    dps = _w_dps(x, u, up, w)
    with mpmath.workdps(dps):
        X, U, UP, W = (mpmath.mpf(c) for c in (x, u, up, w))
        zero = mpmath.mpf(0)
        a = [mpmath.mpf(e2)]
        b = [-mpmath.mpf(e2)]
        sa, sb = a[0], b[0]
        p = mpmath.mpf(1)
        eps = mpmath.mpf(10) ** (-dps + 5)
        two_u2 = 2 * U * U
        small = 0
        k = 0
        while True:
            a1 = a[k - 1] if k >= 1 else zero
            b1 = b[k - 1] if k >= 1 else zero
            b2 = b[k - 2] if k >= 2 else zero
            an = (two_u2 * a[k] - 2 * UP * b[k] - 4 * U * b1) / (k + 1)
            bn = (2 * UP * a[k] - 4 * U * a1 - (2 * X + two_u2) * b[k] + 8 * b2) / (k + 1)
            a.append(an)
            b.append(bn)
            p *= W
            ta, tb = an * p, bn * p
            sa += ta
            sb += tb
            k += 1
            if abs(ta) + abs(tb) <= eps * (abs(sa) + abs(sb)):
                small += 1
                if small >= 3 and k > 8 * abs(w) ** 3:
                    break
            else:
                small = 0
            if k > 20000:
                raise RuntimeError(f"w-series did not converge at x={x}, w={w}")
        beta = sb * mpmath.exp(-(8 * W**3 / 3 - 2 * X * W))
        return float(sa), float(sb), float(beta)


def _w_route(table: PainleveTable, x: np.ndarray, w: float):
    """(a, b, beta) at abscissae ``x`` by the w-direction series."""
    u, up, _, E, _ = eval_painleve(table, x)
    u, up, E = np.atleast_1d(u), np.atleast_1d(up), np.atleast_1d(E)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([_w_taylor(*args, w) for args in zip(x, u, up, E**2)]).reshape(len(x), 3)
    return out[:, 0], out[:, 1], out[:, 2]


def _check_w(w):
    if abs(w) > W_ENVELOPE:
        raise EnvelopeError(f"|w| = {abs(w)} exceeds the accuracy envelope {W_ENVELOPE}")


def ab_at(table: PainleveTable, x, w: float, route: str = "auto"):
    """a(x, w), b(x, w) at one abscissa or an array of them.

    ``route="w"`` sums the w-direction series from the ``w = 0`` data. That
    route is independent of the x sweep but amplifies errors in the
    Painleve data by about ``exp(theta(x, |w|))``, so ``"auto"`` uses it only
    where that is at most ``exp(THETA_W_MAX)`` and takes the x-direction sweep elsewhere.
    ``route="x"`` always sweeps in x.
    """
    _check_w(w)
    if route not in ("auto", "w", "x"):
        raise ValueError(f"unknown route {route!r}")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    g = table.grid
    if np.any(xs < g.x_lo) or np.any(xs > g.x_hi):
        raise ValueError(f"x outside table range [{g.x_lo}, {g.x_hi}]")
    a = np.empty(len(xs))
    b = np.empty(len(xs))
    use_w = np.full(len(xs), route == "w")
    if route == "auto":
        use_w = theta(xs, abs(w)) <= THETA_W_MAX
    if np.any(use_w):
        a[use_w], b[use_w], _ = _w_route(table, xs[use_w], float(w))
    if np.any(~use_w):
        order = np.argsort(xs[~use_w])
        xo = xs[~use_w][order]
        ap, bp = _x_route(table, abs(w), xo)
        if w < 0:
            ap, bp = -bp, -ap  # (a, beta) at -w from (a, beta) at |w|
        ao = np.empty_like(ap)
        bo = np.empty_like(bp)
        ao[order], bo[order] = ap, bp * np.exp(theta(xo, w))
        a[~use_w], b[~use_w] = ao, bo
    if np.ndim(x) == 0:
        return float(a[0]), float(b[0])
    return a, b


def ab_profile_x(table: PainleveTable, w: float) -> TransitionProfile:
    """a, b on the whole table grid from the x-direction system (``w >= 0``)."""
    if w < 0:
        raise ValueError("ab_profile_x needs w >= 0; use profile_signed for negative w")
    _check_w(w)
    if w == 0.0:
        a = table.E**2
        return TransitionProfile(0.0, table.grid, a, -a)
    a, beta = _x_route(table, w, table.grid.x)
    return TransitionProfile(float(w), table.grid, a, beta)


def profile_signed(table: PainleveTable, w: float) -> TransitionProfile:
    """Profile for any real w; negative w reflected from the profile at -w."""
    if w >= 0:
        return ab_profile_x(table, w)
    p = ab_profile_x(table, -w)
    # a(x, w) = -beta(x, -w);  beta(x, w) = b(x, w) e^{-theta(x, w)} = -a(x, -w)
    return TransitionProfile(float(w), table.grid, -p.beta, -p.a)


def erf_limit_check(table: PainleveTable, w: float, y: float) -> float:
    """a(2y sqrt|w| + 4w^2, w) for ``w <= -1.5``; tends to Phi(y) as w -> -inf."""
    if w > -1.5:
        raise ValueError("erf_limit_check is meant for w <= -1.5")
    _check_w(w)
    x = 2.0 * y * math.sqrt(-w) + 4.0 * w * w
    if x < table.grid.x_lo:
        raise ValueError(f"scaled abscissa {x} left of the table")
    if _start_point(-w, x) > EXTENDED_REACH:
        raise ValueError(f"scaled abscissa {x} needs an integration start beyond capacity")
    _, beta = _x_route(table, -w, np.array([x]))
    return float(-beta[0])


def a_beyond(table: PainleveTable, xs, w: float) -> np.ndarray:
    """a(x, w) at ascending ``xs`` that may run past ``x_hi`` (Airy region).

    Uses the x-direction sweep (and the reflection for ``w < 0``).
    """
    _check_w(w)
    xs = np.asarray(xs, dtype=float)
    if xs[0] < table.grid.x_lo:
        raise ValueError(f"x = {xs[0]} left of the table")
    if _start_point(abs(w), float(xs[-1])) > EXTENDED_REACH:
        raise ValueError(f"x = {xs[-1]} beyond the extended reach")
    a, beta = _x_route(table, abs(w), xs)
    return a if w >= 0 else -beta
