"""Monte Carlo samplers: Poisson points with edge sources, geometric last
passage percolation and the discrete-time exclusion process.

Every sampler is a pure function of ``(seed, index)``: the random stream is
a Philox generator keyed by the pair, so replicates can be produced in any
order, on any number of workers, and are reproduced bit for bit.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numba
import numpy as np

__all__ = [
    "PointConfiguration",
    "LppInstance",
    "TasepState",
    "UpdateRule",
    "WindowOverflow",
    "stream",
    "sample_png_config",
    "png_points",
    "longest_weak_chain",
    "brute_force_chain",
    "sample_lpp",
    "geometric",
    "lpp_last_passage",
    "tasep_initial",
    "tasep_run",
    "write_samples_csv",
]

_MASK64 = (1 << 64) - 1

# stream offsets inside one (seed, index) key
_S_PNG, _S_LPP, _S_CORNER, _S_TASEP = 0, 1, 2, 3


def stream(seed: int, index: int, offset: int = 0) -> np.random.Generator:
    """Philox generator keyed by ``(seed, index)``; ``offset`` picks a substream."""
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    counter = np.array([0, 0, 0, offset & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


# ---------------------------------------------------------------------------
# Poisson points and the weak chain


@dataclass(frozen=True, eq=False)
class PointConfiguration:
    """Interior points in (0,1)^2 and source points on the two edges."""

    interior: np.ndarray  # (k, 2)
    bottom: np.ndarray  # x-coordinates of points (x, 0)
    left: np.ndarray  # y-coordinates of points (0, y)

    def __post_init__(self):
        inner = np.asarray(self.interior, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "interior", inner)
        object.__setattr__(self, "bottom", np.asarray(self.bottom, dtype=float).ravel())
        object.__setattr__(self, "left", np.asarray(self.left, dtype=float).ravel())
        for name in ("interior", "bottom", "left"):
            a = getattr(self, name)
            if a.size and (np.any(a <= 0.0) or np.any(a >= 1.0)):
                raise ValueError(f"{name} coordinates must lie strictly inside (0, 1)")

    @property
    def size(self) -> int:
        return len(self.interior) + len(self.bottom) + len(self.left)


def png_points(cfg: PointConfiguration) -> tuple[np.ndarray, np.ndarray]:
    """All points as (xs, ys) with edge points placed at (x, 0) and (0, y)."""
    xs = np.concatenate([cfg.interior[:, 0], cfg.bottom, np.zeros(len(cfg.left))])
    ys = np.concatenate([cfg.interior[:, 1], np.zeros(len(cfg.bottom)), cfg.left])
    return xs, ys


def sample_png_config(t: float, alpha_plus: float, alpha_minus: float, seed: int, index: int) -> PointConfiguration:
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if alpha_plus < 0 or alpha_minus < 0:
        raise ValueError("source intensities must be non-negative")
    rng = stream(seed, index, _S_PNG)
    n_in = rng.poisson(t * t)
    n_b = rng.poisson(alpha_plus * t)
    n_l = rng.poisson(alpha_minus * t)
    # 1 - random() lies in (0, 1]; reflect the rare 1.0 back inside
    def coords(k):
        c = 1.0 - rng.random(k)
        c[c >= 1.0] = 0.5
        return c

    interior = coords(2 * n_in).reshape(n_in, 2)
    return PointConfiguration(interior, coords(n_b), coords(n_l))


@numba.njit(cache=True)
def _longest_nondecreasing(ys):
    tails = np.empty(len(ys))
    m = 0
    for y in ys:
        # first tail strictly greater than y (bisect_right)
        lo, hi = 0, m
        while lo < hi:
            mid = (lo + hi) // 2
            if tails[mid] <= y:
                lo = mid + 1
            else:
                hi = mid
        tails[lo] = y
        if lo == m:
            m += 1
    return m


def longest_weak_chain(cfg: PointConfiguration) -> int:
    """Length of the longest weakly up/right chain, edge points included."""
    if cfg.size == 0:
        return 0
    xs, ys = png_points(cfg)
    order = np.lexsort((ys, xs))
    return int(_longest_nondecreasing(ys[order]))


@numba.njit(cache=True)
def _brute_chain(xs, ys):
    n = len(xs)
    best = 0
    best_mask = 0
    for mask in range(1 << n):
        cnt = 0
        ok = True
        px = -1.0
        py = -1.0
        for i in range(n):
            if mask >> i & 1:
                if cnt > 0 and not (xs[i] >= px and ys[i] >= py):
                    ok = False
                    break
                px = xs[i]
                py = ys[i]
                cnt += 1
        if ok and cnt > best:
            best = cnt
            best_mask = mask
    return best, best_mask


def brute_force_chain(xs, ys) -> tuple[int, np.ndarray]:
    """Exhaustive longest weak chain over all subsets (at most 20 points).

    Returns the length and the indices of one maximal chain. Subsets are
    tested in (x, y) order, which every weak chain respects.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) > 20:
        raise ValueError("brute_force_chain is limited to 20 points")
    if len(xs) == 0:
        return 0, np.zeros(0, dtype=int)
    order = np.lexsort((ys, xs))
    best, mask = _brute_chain(xs[order], ys[order])
    picked = [order[i] for i in range(len(xs)) if mask >> i & 1]
    return int(best), np.array(picked, dtype=int)


# ---------------------------------------------------------------------------
# Last passage percolation


def geometric(rng: np.random.Generator, p: float, size) -> np.ndarray:
    """Variates with P(k) = (1-p) p^k by inversion, ``floor(ln U / ln p)``."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"geometric parameter must lie in [0, 1), got {p}")
    u = 1.0 - rng.random(size)  # (0, 1]
    if p == 0.0:
        return np.zeros(size, dtype=np.int64)
    return np.floor(np.log(u) / math.log(p)).astype(np.int64)


def _geometric_from(u: np.ndarray, p: float) -> np.ndarray:
    if p == 0.0:
        return np.zeros(u.shape, dtype=np.int64)
    return np.floor(np.log(u) / math.log(p)).astype(np.int64)


@functools.lru_cache(maxsize=8)
def _shell_order(n: int) -> np.ndarray:
    """Position of cell (i, j) in the shell-by-shell layout max(i, j) = 0, 1, ...

    The layout of an n-lattice is a prefix of the layout of any larger one,
    so lattices of different size drawn from one key are nested.
    """
    i, j = np.indices((n + 1, n + 1))
    k = np.maximum(i, j)
    pos = np.where(i == k, j, k + 1 + i)
    return k * k + pos


@dataclass(frozen=True, eq=False)
class LppInstance:
    n: int
    q: float
    alpha_plus: float
    alpha_minus: float
    weights: np.ndarray
    corner_weight: int | None = None  # draw from g(alpha+ alpha-), used on request

    def __post_init__(self):
        w = self.weights
        if w.shape != (self.n + 1, self.n + 1):
            raise ValueError(f"weights must be {(self.n + 1, self.n + 1)}, got {w.shape}")
        if w[0, 0] != 0:
            raise ValueError("w(0, 0) must be 0")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")


def _check_lpp_params(q, alpha_plus, alpha_minus):
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    for name, a in (("alpha_plus", alpha_plus), ("alpha_minus", alpha_minus)):
        if a < 0 or a * math.sqrt(q) >= 1.0:
            raise ValueError(f"{name}*sqrt(q) must lie in [0, 1), got {a * math.sqrt(q)}")


def sample_lpp(n: int, q: float, alpha_plus: float, alpha_minus: float, seed: int, index: int) -> LppInstance:
    """Geometric weights on the (n+1) x (n+1) lattice; row 0 and column 0 are sources."""
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_lpp_params(q, alpha_plus, alpha_minus)
    rng = stream(seed, index, _S_LPP)
    u = 1.0 - rng.random((n + 1) ** 2)
    u = u[_shell_order(n)]
    sq = math.sqrt(q)
    w = _geometric_from(u, q)
    w[1:, 0] = _geometric_from(u[1:, 0], alpha_plus * sq)
    w[0, 1:] = _geometric_from(u[0, 1:], alpha_minus * sq)
    w[0, 0] = 0
    w.flags.writeable = False
    corner = None
    pc = alpha_plus * alpha_minus
    if pc < 1.0:
        corner = int(geometric(stream(seed, index, _S_CORNER), pc, 1)[0])
    return LppInstance(n, q, alpha_plus, alpha_minus, w, corner)


@numba.njit(cache=True)
def _last_passage(w):
    n1 = w.shape[0]
    m = np.zeros((n1, n1), dtype=np.int64)
    for i in range(n1):
        for j in range(n1):
            best = 0
            if i > 0:
                best = m[i - 1, j]
            if j > 0 and m[i, j - 1] > best:
                best = m[i, j - 1]
            m[i, j] = w[i, j] + best
    return m[n1 - 1, n1 - 1]


def lpp_last_passage(inst: LppInstance, include_corner_weight: bool = False) -> int:
    """X(N) = max over up/right lattice paths from (0,0) to (N,N) of the weight sum.

    With ``include_corner_weight`` the corner draw from g(alpha+ alpha-) is
    added (every path passes the corner).
    """
    x = int(_last_passage(np.ascontiguousarray(inst.weights, dtype=np.int64)))
    if include_corner_weight:
        if inst.corner_weight is None:
            raise ValueError("corner weight needs alpha_plus * alpha_minus < 1")
        x += inst.corner_weight
    return x


# ---------------------------------------------------------------------------
# Discrete-time exclusion process


class UpdateRule(str, enum.Enum):
    PARALLEL = "parallel"
    SEQUENTIAL_RIGHT_TO_LEFT = "sequential_right_to_left"


class WindowOverflow(RuntimeError):
    """A particle or hole reached the edge of the finite window."""


@dataclass(frozen=True, eq=False)
class TasepState:
    site_lo: int
    site_hi: int
    occupied: np.ndarray
    time: int
    params: tuple
    jumps: int = 0
    _sites: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_sites", np.arange(self.site_lo, self.site_hi + 1))

    @property
    def sites(self) -> np.ndarray:
        return self._sites

    def rightmost_particle(self) -> int:
        return int(self._sites[np.flatnonzero(self.occupied)[-1]])

    def leftmost_hole(self) -> int:
        return int(self._sites[np.flatnonzero(~self.occupied)[0]])

    def bitstring(self) -> str:
        return "".join("1" if o else "0" for o in self.occupied)


def tasep_initial(window_halfwidth: int, params=(0.5, 0.0, 0.0)) -> TasepState:
    """Particles at {..., -3, -2} and {0}, cut to ``[-W, W]``."""
    if window_halfwidth < 3:
        raise ValueError("window_halfwidth must be at least 3")
    sites = np.arange(-window_halfwidth, window_halfwidth + 1)
    occ = (sites <= -2) | (sites == 0)
    return TasepState(-window_halfwidth, window_halfwidth, occ, 0, tuple(params))


@numba.njit(cache=True)
def _tasep_steps(occ, u, p_bulk, p_right, p_left, sequential):
    # u has one row of uniforms per step, one column per site
    n = occ.shape[0]
    jumps = 0
    for t in range(u.shape[0]):
        r = n - 1
        while not occ[r]:
            r -= 1
        h = 0
        while occ[h]:
            h += 1
        front = h - 1  # particle just left of the leftmost hole
        if r >= n - 1 or h <= 0:
            return t, jumps, 1
        base = occ.copy()
        for i in range(r, front - 1, -1):
            if not occ[i]:
                continue
            # parallel moves read the state at the start of the step
            vacant = (not occ[i + 1]) if sequential else (not base[i + 1])
            if not vacant:
                continue
            if i == r:
                p = p_right
            elif i == front:
                p = p_left
            else:
                p = p_bulk
            if u[t, i] < p:
                occ[i] = False
                occ[i + 1] = True
                jumps += 1
    r = n - 1
    while not occ[r]:
        r -= 1
    h = 0
    while occ[h]:
        h += 1
    if r >= n - 1 or h <= 0:
        return u.shape[0], jumps, 1
    return u.shape[0], jumps, 0


def tasep_run(
    params,
    steps: int,
    window_halfwidth: int,
    update_rule=UpdateRule.SEQUENTIAL_RIGHT_TO_LEFT,
    seed: int = 0,
    index: int = 0,
    trajectory: list | None = None,
) -> TasepState:
    """Evolve the exclusion process for ``steps`` discrete steps.

    The rightmost particle jumps with probability ``1 - alpha_plus sqrt(q)``,
    the particle left of the leftmost hole with ``1 - alpha_minus sqrt(q)``
    and every other particle with a free right neighbour with ``1 - q``.
    When ``trajectory`` is a list, ``(time, bitstring)`` pairs are appended.
    Raises :class:`WindowOverflow` if the front or the leftmost hole reaches
    the window edge.
    """
    q, ap, am = (float(p) for p in params)
    rule = UpdateRule(update_rule)
    probs = (1.0 - q, 1.0 - ap * math.sqrt(q), 1.0 - am * math.sqrt(q))
    if not 0.0 <= q <= 1.0 or any(not 0.0 <= p <= 1.0 for p in probs):
        raise ValueError(f"jump probabilities {probs} must lie in [0, 1]")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    state = tasep_initial(window_halfwidth, (q, ap, am))
    occ = state.occupied.copy()
    rng = stream(seed, index, _S_TASEP)
    seq = rule is UpdateRule.SEQUENTIAL_RIGHT_TO_LEFT
    jumps = 0
    if trajectory is not None:
        trajectory.append((0, state.bitstring()))
    done = 0
    chunk = 1 if trajectory is not None else max(1, min(steps, 256))
    while done < steps:
        k = min(chunk, steps - done)
        u = rng.random((k, len(occ)))
        t, dj, overflow = _tasep_steps(occ, u, *probs, seq)
        jumps += dj
        done += t
        if overflow:
            raise WindowOverflow(f"window [-{window_halfwidth}, {window_halfwidth}] reached at step {done}")
        if trajectory is not None:
            trajectory.append((done, "".join("1" if o else "0" for o in occ)))
    return TasepState(state.site_lo, state.site_hi, occ, steps, (q, ap, am), jumps)


# ---------------------------------------------------------------------------


def write_samples_csv(fh, values, start_index: int = 0) -> None:
    fh.write("sample_index,value\n")
    for i, v in enumerate(values):
        fh.write(f"{start_index + i},{v}\n")
