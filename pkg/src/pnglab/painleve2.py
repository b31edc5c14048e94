"""Hastings-McLeod solution of Painleve II and the Tracy-Widom building blocks.

The boundary-value problem ``u'' = 2u^3 + x u`` on ``[x_lo, x_hi]`` is
discretised with the fourth-order Numerov scheme and solved by damped Newton
iteration on the tridiagonal system. Airy data closes the right end and the
large-negative-x expansion closes the left end.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .specfun import RealGrid, airy_ai, airy_ai_array, integrate_sampled

log = logging.getLogger(__name__)

__all__ = [
    "PainleveTable",
    "SolverFailure",
    "solve_hastings_mcleod",
    "default_table",
    "eval_painleve",
    "aux_y",
    "u_extended",
]

DEFAULT_DOMAIN = (-10.0, 8.0, 0.005)
DEFAULT_TOL = 1e-11
MAX_NEWTON = 50


class SolverFailure(RuntimeError):
    """Newton iteration did not converge; ``residual`` is the last max-norm."""

    def __init__(self, msg: str, residual: float):
        super().__init__(msg)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class PainleveTable:
    grid: RealGrid
    u: np.ndarray
    u_prime: np.ndarray
    v: np.ndarray
    E: np.ndarray
    F: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def first_integral_residual(self) -> np.ndarray:
        """``v - (u^4 + x u^2 - u'^2)`` pointwise; zero for an exact solution."""
        x = self.x
        return self.v - (self.u**4 + x * self.u**2 - self.u_prime**2)

    def to_csv(self, fh) -> None:
        fh.write("x,u,u_prime,v,E,F\n")
        for row in zip(self.x, self.u, self.u_prime, self.v, self.E, self.F):
            fh.write(",".join(repr(float(c)) for c in row) + "\n")


def _left_boundary(x: float) -> float:
    # u ~ -sqrt(-x/2) (1 + x^-3/8 - 73 x^-6/128) as x -> -inf
    return -math.sqrt(-x / 2.0) * (1.0 + 1.0 / (8.0 * x**3) - 73.0 / (128.0 * x**6))


def _initial_guess(x: np.ndarray) -> np.ndarray:
    ai, _ = airy_ai_array(np.clip(x, -1.0, None))
    left = -np.sqrt(np.maximum(-x, 0.0) / 2.0)
    s = 1.0 / (1.0 + np.exp(np.clip(3.0 * (x + 1.0), -50, 50)))
    return (1.0 - s) * (-ai) + s * left


def _tail_integrals(x_hi: float) -> tuple[float, float, float]:
    """``int_{x_hi}^inf`` of Ai, Ai^2 and (s - x_hi) Ai^2."""
    g = RealGrid(x_hi, x_hi + 12.0, 0.01)
    ai, _ = airy_ai_array(g.x)
    t1 = integrate_sampled(g, ai)[0]
    t2 = integrate_sampled(g, ai**2)[0]
    t3 = integrate_sampled(g, (g.x - x_hi) * ai**2)[0]
    return t1, t2, t3


def solve_hastings_mcleod(
    x_lo: float = DEFAULT_DOMAIN[0],
    x_hi: float = DEFAULT_DOMAIN[1],
    step: float = DEFAULT_DOMAIN[2],
    tol: float = DEFAULT_TOL,
) -> PainleveTable:
    """Tabulate ``u, u', v, E, F`` for the Hastings-McLeod solution.

    Raises :class:`SolverFailure` when Newton has not converged after 50
    iterations.
    """
    if x_lo > -8 or x_hi < 6 or step > 0.01 or tol < 1e-13:
        raise ValueError(
            f"solve_hastings_mcleod needs x_lo <= -8, x_hi >= 6, step <= 0.01, tol >= 1e-13 "
            f"(got {x_lo}, {x_hi}, {step}, {tol})"
        )
    grid = RealGrid(x_lo, x_hi, step)
    x = grid.x
    n = grid.count
    h2 = step * step / 12.0

    u = _initial_guess(x)
    u[0] = _left_boundary(x_lo)
    u[-1] = -airy_ai(x_hi)[0]

    def residual(u):
        f = 2.0 * u**3 + x * u
        return (u[2:] - 2.0 * u[1:-1] + u[:-2]) - h2 * (f[2:] + 10.0 * f[1:-1] + f[:-2])

    r = residual(u)
    rnorm = np.max(np.abs(r))
    for it in range(MAX_NEWTON):
        fu = 6.0 * u**2 + x
        ab = np.zeros((3, n - 2))
        ab[0, 1:] = 1.0 - h2 * fu[2:-1]
        ab[1, :] = -2.0 - 10.0 * h2 * fu[1:-1]
        ab[2, :-1] = 1.0 - h2 * fu[1:-2]
        du = solve_banded((1, 1), ab, -r)
        lam = 1.0
        while True:
            trial = u.copy()
            trial[1:-1] += lam * du
            rt = residual(trial)
            tnorm = np.max(np.abs(rt))
            if tnorm < rnorm or lam < 1e-3 or tnorm < 1e-15:
                break
            lam *= 0.5
        u, r, rnorm = trial, rt, tnorm
        update = lam * np.max(np.abs(du))
        log.debug("newton %d: |du|=%.3e |r|=%.3e damping=%g", it, update, rnorm, lam)
        if update < tol:
            break
    else:
        raise SolverFailure(f"Newton did not converge in {MAX_NEWTON} iterations", rnorm)

    f = 2.0 * u**3 + x * u
    up = np.empty(n)
    h = step
    up[1:-1] = (u[2:] - u[:-2]) / (2 * h) - h / 12.0 * (f[2:] - f[:-2])
    up[0] = (u[1] - u[0]) / h - h * (7 * f[0] + 6 * f[1] - f[2]) / 24.0
    up[-1] = (u[-1] - u[-2]) / h + h * (7 * f[-1] + 6 * f[-2] - f[-3]) / 24.0

    t1, t2, t3 = _tail_integrals(x_hi)
    v = -(integrate_sampled(grid, u**2) + t2)
    log_e = 0.5 * (integrate_sampled(grid, u) - t1)
    log_f = 0.5 * (integrate_sampled(grid, v) - t3)

    arrays = [u, up, v, np.exp(log_e), np.exp(log_f)]
    for a in arrays:
        a.flags.writeable = False
    return PainleveTable(grid, *arrays)


_DEFAULT: dict[tuple, PainleveTable] = {}


def default_table(x_lo=DEFAULT_DOMAIN[0], x_hi=DEFAULT_DOMAIN[1], step=DEFAULT_DOMAIN[2]) -> PainleveTable:
    """Memoised :func:`solve_hastings_mcleod` at the default tolerance."""
    key = (x_lo, x_hi, step)
    if key not in _DEFAULT:
        _DEFAULT[key] = solve_hastings_mcleod(x_lo, x_hi, step, DEFAULT_TOL)
    return _DEFAULT[key]


def _locate(table: PainleveTable, x):
    g = table.grid
    xs = np.asarray(x, dtype=float)
    slack = 1e-9 * g.step
    if np.any(xs < g.x_lo - slack) or np.any(xs > g.x_hi + slack):
        raise ValueError(f"x outside table range [{g.x_lo}, {g.x_hi}]")
    s = np.clip((xs - g.x_lo) / g.step, 0.0, g.count - 1)
    i = np.minimum(np.floor(s).astype(int), g.count - 2)
    return i, s - i


def _hermite(y, dy, i, t, h):
    y0, y1 = y[i], y[i + 1]
    d0, d1 = dy[i] * h, dy[i + 1] * h
    t2 = t * t
    t3 = t2 * t
    return (
        (2 * t3 - 3 * t2 + 1) * y0
        + (t3 - 2 * t2 + t) * d0
        + (-2 * t3 + 3 * t2) * y1
        + (t3 - t2) * d1
    )


def eval_painleve(table: PainleveTable, x):
    """Cubic Hermite interpolation of ``(u, u', v, E, F)`` at ``x``.

    Every column uses its exact derivative from the ODEs, so the error is
    O(step^4). ``x`` may be a scalar or an array; outside the table a
    ``ValueError`` is raised rather than extrapolating.
    """
    i, t = _locate(table, x)
    h = table.grid.step
    xg = table.x
    u, up, v, E, F = table.u, table.u_prime, table.v, table.E, table.F
    upp = 2.0 * u**3 + xg * u
    cols = (
        _hermite(u, up, i, t, h),
        _hermite(up, upp, i, t, h),
        _hermite(v, u**2, i, t, h),
        _hermite(E, -0.5 * u * E, i, t, h),
        _hermite(F, -0.5 * v * F, i, t, h),
    )
    if np.ndim(x) == 0:
        return tuple(float(c) for c in cols)
    return cols


def aux_y(table: PainleveTable, x):
    """``y(x) = x + 2u'(x) + 2u(x)^2``, which solves ``y' = 1 + 2uy``."""
    u, up, _, _, _ = eval_painleve(table, x)
    return np.asarray(x) + 2.0 * up + 2.0 * u**2 if np.ndim(x) else x + 2.0 * up + 2.0 * u * u


def u_extended(table: PainleveTable, x):
    """``(u, u')`` from the table inside its range and ``-Ai`` beyond ``x_hi``."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.empty_like(xs)
    up = np.empty_like(xs)
    inside = xs <= table.grid.x_hi
    if np.any(inside):
        cols = eval_painleve(table, xs[inside])
        u[inside], up[inside] = cols[0], cols[1]
    if np.any(~inside):
        ai, aip = airy_ai_array(xs[~inside])
        u[~inside], up[~inside] = -ai, -aip
    if np.ndim(x) == 0:
        return float(u[0]), float(up[0])
    return u, up
