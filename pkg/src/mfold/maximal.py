"""Uncentered Hardy-Littlewood maximal operators on grids.

In one dimension the supremum runs over every run of contiguous cells and is
computed exactly.  In two dimensions it runs over axis-parallel squares of
selected side lengths at every position, clipped to the grid; averages use
the clipped volume.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .measure import Grid, ScalarField

__all__ = ["WindowFamily", "hl_maximal", "m_tensor", "calderon_maximal_1d"]

# Segments at or below this length are solved by the quadratic scan.
_BRUTE_CUTOFF = 48


@dataclass(frozen=True)
class WindowFamily:
    """The cubes over which averages are taken.

    ``sizes="all"`` in 1D is every interval of cells.  Otherwise windows are
    squares (intervals in 1D) of side ``s`` cells for every ``s`` in
    :attr:`side_lengths`, placed at every offset that meets the grid and
    clipped to it.  ``"dyadic"`` uses s = 1, 2, 4, ..., N and is the default
    in 2D; ``"all"`` in 2D uses every s = 1..N.
    """

    grid: Grid
    sizes: str = "auto"

    def __post_init__(self):
        if self.sizes == "auto":
            object.__setattr__(self, "sizes", "all" if self.grid.n == 1 else "dyadic")
        if self.sizes not in ("all", "dyadic"):
            raise ValueError(f"unknown window sizes {self.sizes!r}")

    @property
    def exhaustive_1d(self) -> bool:
        return self.grid.n == 1 and self.sizes == "all"

    @property
    def side_lengths(self) -> list[int]:
        N = self.grid.N
        if self.sizes == "all":
            return list(range(1, N + 1))
        out, s = [], 1
        while s < N:
            out.append(s)
            s *= 2
        return out + [N]

    @cached_property
    def _bounds(self) -> tuple[np.ndarray, ...]:
        """Per-axis half-open cell ranges (lo, hi) of every window."""
        N = self.grid.N
        if self.exhaustive_1d:
            lo, last = np.triu_indices(N)
            return lo, last + 1
        los, his = [], []
        for s in self.side_lengths:
            start = np.arange(-(s - 1), N)
            lo, hi = np.clip(start, 0, N), np.clip(start + s, 0, N)
            if self.grid.n == 1:
                los.append(lo)
                his.append(hi)
            else:
                a, b = np.meshgrid(np.arange(len(lo)), np.arange(len(lo)), indexing="ij")
                a, b = a.ravel(), b.ravel()
                los.append(np.stack([lo[a], lo[b]]))
                his.append(np.stack([hi[a], hi[b]]))
        axis = -1
        return np.concatenate(los, axis=axis), np.concatenate(his, axis=axis)

    @property
    def size(self) -> int:
        return int(self._bounds[0].shape[-1])

    @cached_property
    def cell_counts(self) -> np.ndarray:
        lo, hi = self._bounds
        if self.grid.n == 1:
            return (hi - lo).astype(float)
        return ((hi[0] - lo[0]) * (hi[1] - lo[1])).astype(float)

    def sums(self, values) -> np.ndarray:
        """Sum of cell values over every window (no cell-volume factor)."""
        v = np.asarray(values, dtype=float).reshape(self.grid.shape)
        lo, hi = self._bounds
        if self.grid.n == 1:
            S = np.concatenate([[0.0], np.cumsum(v)])
            return S[hi] - S[lo]
        P = np.zeros((self.grid.N + 1,) * 2)
        P[1:, 1:] = v.cumsum(0).cumsum(1)
        return P[hi[0], hi[1]] - P[lo[0], hi[1]] - P[hi[0], lo[1]] + P[lo[0], lo[1]]

    def averages(self, values) -> np.ndarray:
        return self.sums(values) / self.cell_counts

    def corners(self, k: int) -> tuple[int, int]:
        """Flat indices of the first and last cell of window ``k``."""
        lo, hi = self._bounds
        if self.grid.n == 1:
            return int(lo[k]), int(hi[k] - 1)
        N = self.grid.N
        return int(lo[0, k] * N + lo[1, k]), int((hi[0, k] - 1) * N + hi[1, k] - 1)

    def mask(self, k: int) -> np.ndarray:
        """Boolean cell mask of window ``k``."""
        lo, hi = self._bounds
        m = np.zeros(self.grid.shape, dtype=bool)
        if self.grid.n == 1:
            m[lo[k] : hi[k]] = True
        else:
            m[lo[0, k] : hi[0, k], lo[1, k] : hi[1, k]] = True
        return m.reshape(-1)


def hl_maximal(f: ScalarField, windows: WindowFamily | None = None) -> ScalarField:
    """Mf(x) = max over windows containing x of the window average of |f|."""
    windows = windows or WindowFamily(f.grid)
    if windows.grid != f.grid:
        raise ValueError("window family and field live on different grids")
    if windows.exhaustive_1d:
        out = _maximal_all_intervals(f.values)
    else:
        out = _maximal_by_sides(f.array, windows.side_lengths).reshape(-1)
    # averages never exceed the largest value; clip rounding noise
    return ScalarField(f.grid, np.clip(out, f.values, f.values.max()))


def m_tensor(f: ScalarField, g: ScalarField, windows: WindowFamily | None = None) -> ScalarField:
    """Pointwise product Mf * Mg."""
    return hl_maximal(f, windows) * hl_maximal(g, windows)


def _maximal_by_sides(arr: np.ndarray, sides: list[int]) -> np.ndarray:
    N = arr.shape[0]
    out = arr.copy()
    P = np.zeros(tuple(N + 1 for _ in arr.shape))
    if arr.ndim == 1:
        P[1:] = arr.cumsum()
    else:
        P[1:, 1:] = arr.cumsum(0).cumsum(1)
    for s in sides:
        start = np.arange(-(s - 1), N)
        lo, hi = np.clip(start, 0, N), np.clip(start + s, 0, N)
        if arr.ndim == 1:
            avg = (P[hi] - P[lo]) / (hi - lo)
            best = sliding_window_view(avg, s).max(axis=-1)
        else:
            sums = P[np.ix_(hi, hi)] - P[np.ix_(lo, hi)] - P[np.ix_(hi, lo)] + P[np.ix_(lo, lo)]
            avg = sums / np.outer(hi - lo, hi - lo)
            best = sliding_window_view(avg, s, axis=0).max(axis=-1)
            best = sliding_window_view(best, s, axis=1).max(axis=-1)
        np.maximum(out, best, out=out)
    return out


def _maximal_all_intervals(v: np.ndarray) -> np.ndarray:
    """Exact maximal function over all intervals of a 1D array.

    With prefix sums S, the average over cells a..c-1 is the slope between
    the points (a, S_a) and (c, S_c).  Intervals crossing the midpoint m of
    a segment are handled with convex hulls: for every left endpoint the best
    right endpoint is a tangent to the upper hull of the right points, found
    by binary search; prefix/suffix maxima then assign the crossing optimum
    to each cell.  The two halves recurse.
    """
    N = len(v)
    S = np.concatenate([[0.0], np.cumsum(v)])
    out = np.array(v, dtype=float)
    stack = [(0, N)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo <= _BRUTE_CUTOFF:
            _brute_segment(S, lo, hi, out)
            continue
        m = (lo + hi) // 2
        a = np.arange(lo, m)
        c = np.arange(m + 1, hi + 1)

        h = _upper_hull(c.astype(float), S[c])
        best_a = _max_slope(a.astype(float), S[a], c[h].astype(float), S[c[h]])
        np.maximum(out[lo:m], np.maximum.accumulate(best_a), out=out[lo:m])

        # point reflection turns "max slope from the left set" into the same query
        ar = a[::-1]
        h = _upper_hull(-ar.astype(float), -S[ar])
        best_c = _max_slope(-c.astype(float), -S[c], -ar[h].astype(float), -S[ar[h]])
        suffix = np.maximum.accumulate(best_c[::-1])[::-1]
        np.maximum(out[m:hi], suffix, out=out[m:hi])

        stack.append((lo, m))
        stack.append((m, hi))
    return out


def _brute_segment(S: np.ndarray, lo: int, hi: int, out: np.ndarray) -> None:
    """All intervals inside cells lo..hi-1."""
    a = np.arange(lo, hi)[:, None]
    c = np.arange(lo + 1, hi + 1)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        avg = np.where(c > a, (S[c] - S[a]) / (c - a), -np.inf)
    # best[a, i] = max over c >= i+1, then max over a <= i
    best = np.maximum.accumulate(avg[:, ::-1], axis=1)[:, ::-1]
    best = np.maximum.accumulate(best, axis=0)
    np.maximum(out[lo:hi], np.diagonal(best), out=out[lo:hi])


def _upper_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the strictly concave upper hull of points sorted by x."""
    hull: list[int] = []
    for i in range(len(x)):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            if (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o]) >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=int)


def _max_slope(qx, qy, hx, hy) -> np.ndarray:
    """Max slope from each query point to a hull lying strictly to its right.

    Along a strictly concave chain the slope from an external left point is
    unimodal, so a vectorized binary search finds the tangent vertex.
    """
    k = len(hx)
    lo = np.zeros(len(qx), dtype=int)
    hi = np.full(len(qx), k - 1)
    while True:
        active = lo < hi
        if not active.any():
            break
        mid = (lo + hi) // 2
        nxt = np.minimum(mid + 1, k - 1)
        # slope(q, H[nxt]) > slope(q, H[mid]) by cross-multiplication
        rising = (hy[nxt] - qy) * (hx[mid] - qx) > (hy[mid] - qy) * (hx[nxt] - qx)
        lo = np.where(active & rising, mid + 1, lo)
        hi = np.where(active & ~rising, mid, hi)
    return (hy[lo] - qy) / (hx[lo] - qx)


def calderon_maximal_1d(f: ScalarField, g: ScalarField) -> ScalarField:
    """sup over radii of the symmetric average of |f(x - y)| |g(x + y)|.

    Radii are (k + 1/2) h for k = 0, 1, ..., N - 1, so the ball around a cell
    center covers exactly 2k + 1 cells on each side pattern and the integral
    is the exact cell sum of f[i - j] g[i + j], |j| <= k.  Values off the grid
    are zero.
    """
    if f.grid.n != 1 or g.grid != f.grid:
        raise ValueError("the bilinear maximal operator is implemented on a shared 1D grid")
    N = f.grid.N
    fp = np.concatenate([np.zeros(N), f.values, np.zeros(N)])
    gp = np.concatenate([np.zeros(N), g.values, np.zeros(N)])
    idx = np.arange(N) + N
    total = f.values * g.values
    best = total.copy()
    for k in range(1, N):
        total = total + fp[idx - k] * gp[idx + k] + fp[idx + k] * gp[idx - k]
        np.maximum(best, total / (2 * k + 1), out=best)
    return ScalarField(f.grid, best)
