"""Weight and function generators, and Muckenhoupt-type constants.

Every constant is a maximum over a :class:`~mfold.maximal.WindowFamily`.
Averages are formed in cell units (window sum / cell count), so the grid
spacing cancels and the constant weight gives exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .maximal import WindowFamily, hl_maximal
from .measure import Grid, ScalarField, WeightField

__all__ = [
    "Constant",
    "Power",
    "CounterexampleW2",
    "PiecewiseRandom",
    "ProductCombine",
    "Indicator",
    "CounterexampleF",
    "CounterexampleG",
    "RandomSteps",
    "realize",
    "spec_to_json",
    "spec_from_json",
    "ConstantReport",
    "ap_constant",
    "a1_constant",
    "apr_constant",
    "rh_constant",
    "cube_comparability",
    "combined_exponent",
    "window_weak_norms",
]


def combined_exponent(p1: float, p2: float) -> float:
    """p with 1/p = 1/p1 + 1/p2."""
    return 1.0 / (1.0 / p1 + 1.0 / p2)


def conjugate(p: float) -> float:
    return math.inf if p == 1 else p / (p - 1)


# -- specs -------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    c: float = 1.0


@dataclass(frozen=True)
class Power:
    """|x|^a evaluated at cell centers."""

    a: float


@dataclass(frozen=True)
class CounterexampleW2:
    """|x|^{-n(1 + p2/p1)} off the unit ball, 1 inside."""

    p1: float
    p2: float

    def exponent(self, n: int) -> float:
        return -n * (1 + self.p2 / self.p1)


@dataclass(frozen=True)
class PiecewiseRandom:
    """Log-uniform levels in [low, high] on blocks of side ``width``.

    Blocks are fixed in space (block k covers [k*width, (k+1)*width)) and each
    block's level depends only on (seed, block), so enlarging the domain
    extends the weight without changing it.
    """

    seed: int
    low: float = 1.0
    high: float = 16.0
    width: float = 1.0


@dataclass(frozen=True)
class ProductCombine:
    """first^{p/p1} * second^{p/p2} with 1/p = 1/p1 + 1/p2."""

    first: object
    second: object
    p1: float
    p2: float


@dataclass(frozen=True)
class Indicator:
    """Indicator of the box [lo, hi]^n (cell centers inside)."""

    lo: float
    hi: float


@dataclass(frozen=True)
class CounterexampleF:
    """|x|^{-n/p1} off the unit ball."""

    p1: float


@dataclass(frozen=True)
class CounterexampleG:
    """|x|^{n/p1} off the unit ball."""

    p1: float


@dataclass(frozen=True)
class RandomSteps:
    """Random piecewise-constant function with heavy-tailed levels and gaps."""

    seed: int
    pieces: int = 12
    tail: float = 1.5
    zero_fraction: float = 0.3


SPECS = {
    cls.__name__: cls
    for cls in (
        Constant,
        Power,
        CounterexampleW2,
        PiecewiseRandom,
        ProductCombine,
        Indicator,
        CounterexampleF,
        CounterexampleG,
        RandomSteps,
    )
}
WEIGHT_SPECS = ("Constant", "Power", "CounterexampleW2", "PiecewiseRandom", "ProductCombine")


def spec_to_json(spec) -> dict:
    out = {"tag": type(spec).__name__}
    for f in fields(spec):
        v = getattr(spec, f.name)
        out[f.name] = spec_to_json(v) if type(v).__name__ in SPECS else v
    return out


def spec_from_json(data: dict):
    data = dict(data)
    try:
        cls = SPECS[data.pop("tag")]
    except KeyError as exc:
        raise ValueError(f"unknown field spec {exc}") from None
    kwargs = {k: spec_from_json(v) if isinstance(v, dict) else v for k, v in data.items()}
    return cls(**kwargs)


def realize(spec, grid: Grid) -> ScalarField:
    """Sample a spec on a grid; weight specs give a :class:`WeightField`."""
    r = grid.radius
    if isinstance(spec, Constant):
        return WeightField(grid, np.full(grid.size, float(spec.c)))
    if isinstance(spec, Power):
        return WeightField(grid, r**spec.a)
    if isinstance(spec, CounterexampleW2):
        outside = r >= 1
        vals = np.ones(grid.size)
        vals[outside] = r[outside] ** spec.exponent(grid.n)
        return WeightField(grid, vals)
    if isinstance(spec, PiecewiseRandom):
        return WeightField(grid, _piecewise_levels(spec, grid))
    if isinstance(spec, ProductCombine):
        w1, w2 = realize(spec.first, grid), realize(spec.second, grid)
        p = combined_exponent(spec.p1, spec.p2)
        return WeightField(grid, w1.values ** (p / spec.p1) * w2.values ** (p / spec.p2))
    if isinstance(spec, Indicator):
        inside = np.all((grid.centers >= spec.lo) & (grid.centers <= spec.hi), axis=1)
        return ScalarField(grid, inside.astype(float))
    if isinstance(spec, CounterexampleF):
        return ScalarField(grid, np.where(r >= 1, r ** (-grid.n / spec.p1), 0.0))
    if isinstance(spec, CounterexampleG):
        return ScalarField(grid, np.where(r >= 1, r ** (grid.n / spec.p1), 0.0))
    if isinstance(spec, RandomSteps):
        return ScalarField(grid, random_steps(np.random.default_rng(spec.seed), grid, spec))
    raise TypeError(f"not a field spec: {spec!r}")


def _piecewise_levels(spec: PiecewiseRandom, grid: Grid) -> np.ndarray:
    block = np.floor(grid.centers / spec.width).astype(np.int64)
    # fold signed block coordinates into one nonnegative key per cell
    key = np.where(block >= 0, 2 * block, -2 * block - 1)
    if grid.n == 2:
        k0, k1 = key[:, 0], key[:, 1]
        key = (k0 + k1) * (k0 + k1 + 1) // 2 + k1
    else:
        key = key[:, 0]
    uniq, inverse = np.unique(key, return_inverse=True)
    u = np.array([np.random.default_rng([spec.seed, int(k)]).random() for k in uniq])
    levels = spec.low * (spec.high / spec.low) ** u
    return levels[inverse]


def random_steps(rng: np.random.Generator, grid: Grid, spec: RandomSteps | None = None) -> np.ndarray:
    spec = spec or RandomSteps(seed=0)
    pieces = max(1, int(spec.pieces))
    levels = rng.pareto(spec.tail, pieces) + rng.random(pieces)
    levels[rng.random(pieces) < spec.zero_fraction] = 0.0
    if grid.n == 1:
        cuts = np.sort(rng.choice(np.arange(1, grid.N), size=min(pieces - 1, grid.N - 1), replace=False))
        labels = np.searchsorted(cuts, np.arange(grid.N), side="right")
        return levels[labels % pieces]
    side = max(1, int(round(math.sqrt(pieces))))
    cut_r = np.sort(rng.choice(np.arange(1, grid.N), size=min(side - 1, grid.N - 1), replace=False))
    cut_c = np.sort(rng.choice(np.arange(1, grid.N), size=min(side - 1, grid.N - 1), replace=False))
    rows = np.searchsorted(cut_r, np.arange(grid.N), side="right")
    cols = np.searchsorted(cut_c, np.arange(grid.N), side="right")
    labels = (rows[:, None] * side + cols[None, :]) % pieces
    return levels[labels].reshape(-1)


# -- constants ---------------------------------------------------------------


@dataclass(frozen=True)
class ConstantReport:
    """A constant, the window (or instance) that attains it, and the sweep size.

    ``witness`` holds the flat indices of the first and last cell of the
    witnessing window; ``family_size`` is the number of candidates compared.
    """

    name: str
    value: float
    witness: tuple[int, int]
    family_size: int
    p: float | None = None
    skipped: int = 0

    def csv_row(self) -> list[str]:
        p = "" if self.p is None else _fmt(self.p)
        return [self.name, p, _fmt(self.value), str(self.witness[0]), str(self.witness[1]), str(self.family_size)]

    def to_json(self) -> dict:
        return asdict(self)


CONSTANT_CSV_HEADER = ["constant_name", "p", "value", "witness_lo", "witness_hi", "family_size"]


def _fmt(x: float) -> str:
    return f"{float(x):.15g}"


def _report(name, values, windows: WindowFamily, p=None) -> ConstantReport:
    k = int(np.argmax(values))  # first maximizer: smallest window index wins ties
    return ConstantReport(name, float(values[k]), windows.corners(k), windows.size, p)


def _family(w: ScalarField, windows: WindowFamily | None) -> WindowFamily:
    windows = windows or WindowFamily(w.grid)
    if windows.grid != w.grid:
        raise ValueError("window family and weight live on different grids")
    return windows


def ap_constant(w: WeightField, p: float, windows: WindowFamily | None = None) -> ConstantReport:
    """sup_Q (avg_Q w) (avg_Q w^{1-p'})^{p-1}; p = 1 is delegated to :func:`a1_constant`."""
    if p < 1:
        raise ValueError(f"A_p needs p >= 1, got {p}")
    if p == 1:
        return a1_constant(w, windows)
    windows = _family(w, windows)
    dual = w.values ** (1 - conjugate(p))
    values = windows.averages(w.values) * windows.averages(dual) ** (p - 1)
    return _report("ap", values, windows, p)


def a1_constant(w: WeightField, windows: WindowFamily | None = None) -> ConstantReport:
    """max over cells of Mw / w.  The witness is the extremal cell, twice."""
    windows = _family(w, windows)
    ratio = hl_maximal(w, windows).values / w.values
    k = int(np.argmax(ratio))
    return ConstantReport("a1", float(ratio[k]), (k, k), windows.size, 1.0)


def window_weak_norms(
    v: ScalarField, w: WeightField, exponent: float, windows: WindowFamily, normalize: bool = False
) -> np.ndarray:
    """sup_y y * w(Q and {|v| >= y})^exponent for every window Q.

    The supremum is attained at the values of v, so it is a maximum over the
    distinct levels t of t * (w-mass of Q where v >= t)^exponent.  With
    ``normalize`` the mass is divided by the window's cell count instead of
    being multiplied by the cell volume.  Cost: (distinct levels) x (windows).
    """
    levels = np.unique(v.values)[::-1]
    levels = levels[levels > 0]
    best = np.zeros(windows.size)
    scale = 1.0 / windows.cell_counts if normalize else w.grid.cell_volume
    for t in levels:
        mass = windows.sums(np.where(v.values >= t, w.values, 0.0)) * scale
        if exponent == 0:
            term = np.where(mass > 0, t, 0.0)
        else:
            term = t * mass**exponent
        np.maximum(best, term, out=best)
    return best


def apr_constant(w: WeightField, p: float, windows: WindowFamily | None = None) -> ConstantReport:
    """sup_Q w(Q)^{1/p} ||chi_Q w^{-1}||_{L^{p',inf}(w)} / |Q|.

    For p = 1 the inner norm is the sup norm, giving sup_Q avg_Q w / min_Q w.
    """
    if p < 1:
        raise ValueError(f"A_p^R needs p >= 1, got {p}")
    windows = _family(w, windows)
    inv = ScalarField(w.grid, 1.0 / w.values)
    exponent = 0.0 if p == 1 else 1.0 / conjugate(p)
    inner = window_weak_norms(inv, w, exponent, windows, normalize=True)
    values = windows.averages(w.values) ** (1.0 / p) * inner
    return _report("apr", values, windows, p)


def rh_constant(w: WeightField, s: float, windows: WindowFamily | None = None) -> ConstantReport:
    """sup_Q (avg_Q w^s)^{1/s} / avg_Q w."""
    if s <= 1:
        raise ValueError(f"reverse Holder exponent must exceed 1, got {s}")
    windows = _family(w, windows)
    values = windows.averages(w.values**s) ** (1.0 / s) / windows.averages(w.values)
    return _report("rh", values, windows, s)


@dataclass(frozen=True)
class Comparability:
    min_ratio: float
    max_ratio: float
    min_witness: tuple[int, int]
    max_witness: tuple[int, int]
    family_size: int


def cube_comparability(
    w1: WeightField, w2: WeightField, p1: float, p2: float, windows: WindowFamily | None = None
) -> Comparability:
    """Extremes over Q of w1(Q)^{1/p1} w2(Q)^{1/p2} / w(Q)^{1/p}, w = w1^{p/p1} w2^{p/p2}.

    Holder's inequality on each window keeps the ratio >= 1.
    """
    windows = _family(w1, windows)
    p = combined_exponent(p1, p2)
    w = w1.values ** (p / p1) * w2.values ** (p / p2)
    ratio = (
        windows.averages(w1.values) ** (1 / p1)
        * windows.averages(w2.values) ** (1 / p2)
        / windows.averages(w) ** (1 / p)
    )
    lo, hi = int(np.argmin(ratio)), int(np.argmax(ratio))
    return Comparability(
        float(ratio[lo]), float(ratio[hi]), windows.corners(lo), windows.corners(hi), windows.size
    )
