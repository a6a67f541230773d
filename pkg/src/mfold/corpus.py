"""Seeded instance generators for the verification suites."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .measure import Grid, ScalarField, WeightField
from .weights import (
    Constant,
    CounterexampleF,
    CounterexampleG,
    Indicator,
    PiecewiseRandom,
    Power,
    RandomSteps,
    combined_exponent,
    random_steps,
    realize,
)

__all__ = ["Instance", "random_instance", "random_set", "random_weight", "structured_functions"]


@dataclass(frozen=True, eq=False)
class Instance:
    """Two functions, two weights and two exponents on one grid.

    The exponent p (1/p = 1/p1 + 1/p2) and the weight w = w1^{p/p1} w2^{p/p2}
    are derived, never stored.
    """

    f: ScalarField
    g: ScalarField
    w1: WeightField
    w2: WeightField
    p1: float
    p2: float
    seed: int | None = None

    def __post_init__(self):
        grids = {self.f.grid, self.g.grid, self.w1.grid, self.w2.grid}
        if len(grids) != 1:
            raise ValueError("instance fields must share one grid")
        if self.p1 <= 0 or self.p2 <= 0:
            raise ValueError("exponents must be positive")

    @property
    def grid(self) -> Grid:
        return self.f.grid

    @property
    def p(self) -> float:
        return combined_exponent(self.p1, self.p2)

    @cached_property
    def w(self) -> WeightField:
        p = self.p
        return WeightField(self.grid, self.w1.values ** (p / self.p1) * self.w2.values ** (p / self.p2))

    def swapped(self) -> "Instance":
        return Instance(self.g, self.f, self.w2, self.w1, self.p2, self.p1, self.seed)

    def with_functions(self, f: ScalarField, g: ScalarField) -> "Instance":
        return Instance(f, g, self.w1, self.w2, self.p1, self.p2, self.seed)


def random_weight(rng: np.random.Generator, grid: Grid, kinds=("constant", "power", "piecewise")) -> WeightField:
    """A weight from the bounded-level families: constant, mild power, or piecewise with level ratio <= 16."""
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "constant":
        return realize(Constant(float(rng.uniform(0.5, 4.0))), grid)
    if kind == "power":
        return realize(Power(float(rng.uniform(-0.5, 1.0))), grid)
    ratio = float(rng.uniform(1.5, 16.0))
    low = float(rng.uniform(0.25, 2.0))
    width = float(grid.R / rng.integers(1, 8))
    return realize(PiecewiseRandom(int(rng.integers(2**31)), low, low * ratio, width), grid)


def random_set(rng: np.random.Generator, grid: Grid) -> np.ndarray:
    """Union of a few random boxes, or a sparse random mask."""
    if rng.random() < 0.25:
        return rng.random(grid.size) < rng.uniform(0.0, 0.3)
    mask = np.zeros(grid.shape, dtype=bool)
    for _ in range(int(rng.integers(0, 4))):
        lo = rng.integers(0, grid.N, size=grid.n)
        hi = lo + rng.integers(1, grid.N // 2 + 1, size=grid.n)
        mask[tuple(slice(a, b) for a, b in zip(lo, hi))] = True
    return mask.reshape(-1)


def random_function(rng: np.random.Generator, grid: Grid) -> ScalarField:
    spec = RandomSteps(
        seed=0,
        pieces=int(rng.integers(1, 24)),
        tail=float(rng.uniform(0.8, 3.0)),
        zero_fraction=float(rng.uniform(0.0, 0.5)),
    )
    return ScalarField(grid, random_steps(rng, grid, spec))


def random_instance(
    seed: int,
    grid: Grid,
    p_range: tuple[float, float] = (1.0, 4.0),
    weight_kinds=("constant", "power", "piecewise"),
) -> Instance:
    rng = np.random.default_rng(seed)
    p1, p2 = rng.uniform(*p_range, size=2)
    return Instance(
        random_function(rng, grid),
        random_function(rng, grid),
        random_weight(rng, grid, weight_kinds),
        random_weight(rng, grid, weight_kinds),
        float(p1),
        float(p2),
        seed,
    )


def structured_functions(grid: Grid, p1: float = 2.0) -> list[ScalarField]:
    """Indicators of centered boxes, power functions and the divergent pair's f and g."""
    out = [realize(Indicator(-r, r), grid) for r in (grid.h, 1.0, grid.R / 4, grid.R)]
    out.append(realize(Indicator(0.0, 1.0), grid))
    out += [realize(Power(a), grid) for a in (-0.5, 0.5)]
    out += [realize(CounterexampleF(p1), grid), realize(CounterexampleG(p1), grid)]
    return [f for f in out if f.values.any()]
