"""Reference implementations that share no code with the package.

Each one is the textbook definition evaluated directly, usually in O(N^2)
or worse, and is only meant for small grids.
"""

import itertools

import numpy as np


def layer_cake_p1(f, w, h_n, p):
    """p * integral_0^inf lambda(y)^{1/p} dy, exact for step integrands in y."""
    f, w = np.asarray(f, float), np.asarray(w, float)
    levels = np.unique(np.concatenate([[0.0], f]))
    total = 0.0
    for lo, hi in zip(levels[:-1], levels[1:]):
        lam = w[f > lo].sum() * h_n
        total += (hi - lo) * lam ** (1 / p)
    return p * total


def weak_sup(f, w, h_n, p):
    """sup_y y lambda(y)^{1/p}; attained as y increases to a cell value."""
    f, w = np.asarray(f, float), np.asarray(w, float)
    best = 0.0
    for v in f:
        if v > 0:
            best = max(best, v * (w[f >= v].sum() * h_n) ** (1 / p))
    return best


def dense_weak_sup(f, w, h_n, p, samples=4001):
    """The same supremum sampled on a dense level grid (a lower estimate)."""
    f, w = np.asarray(f, float), np.asarray(w, float)
    ys = np.linspace(0, f.max(), samples)
    lam = np.array([w[f > y].sum() * h_n for y in ys])
    return float(np.max(ys * lam ** (1 / p)))


def brute_maximal_1d(v):
    """max over all intervals [a, c] containing i of the mean of v[a..c]."""
    v = np.asarray(v, float)
    N = len(v)
    out = np.zeros(N)
    for a in range(N):
        s = 0.0
        for c in range(a, N):
            s += v[c]
            m = s / (c - a + 1)
            out[a : c + 1] = np.maximum(out[a : c + 1], m)
    return out


def brute_maximal_2d(arr, sides):
    """Clipped squares of the given side lengths at every offset."""
    arr = np.asarray(arr, float)
    N = arr.shape[0]
    out = arr.copy()
    for s in sides:
        for i0 in range(-(s - 1), N):
            for j0 in range(-(s - 1), N):
                a, b = max(i0, 0), min(i0 + s, N)
                c, d = max(j0, 0), min(j0 + s, N)
                block = arr[a:b, c:d]
                out[a:b, c:d] = np.maximum(out[a:b, c:d], block.mean())
    return out


def brute_calderon(f, g):
    f, g = np.asarray(f, float), np.asarray(g, float)
    N = len(f)
    out = np.zeros(N)
    at = lambda arr, k: arr[k] if 0 <= k < N else 0.0
    for i in range(N):
        for k in range(N):
            s = sum(at(f, i - j) * at(g, i + j) for j in range(-k, k + 1))
            out[i] = max(out[i], s / (2 * k + 1))
    return out


def brute_kolmogorov(h, w, cell, p, q):
    """sup over nonempty cell subsets, by itertools rather than bitmasks."""
    h, w = np.asarray(h, float), np.asarray(w, float)
    best = 0.0
    idx = range(len(h))
    for r in range(1, len(h) + 1):
        for S in itertools.combinations(idx, r):
            S = list(S)
            wS = w[S].sum() * cell
            val = wS ** (1 / p - 1 / q) * ((h[S] ** q * w[S]).sum() * cell) ** (1 / q)
            best = max(best, val)
    return best
