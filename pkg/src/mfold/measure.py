"""Grids, weighted measures, rearrangements and Lorentz quasi-norms.

Functions and weights are piecewise constant on the cells of a uniform grid
over the cube [-R, R]^n, so every integral below is an exact finite sum.
Values are stored flat in row-major order; ``Grid.shape`` recovers the
n-dimensional layout.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "Grid",
    "ScalarField",
    "WeightField",
    "StepRearrangement",
    "LorentzIndex",
    "weighted_measure",
    "distribution",
    "rearrangement",
    "lorentz_p1_norm",
    "lorentz_pinf_norm",
    "lp_norm",
    "lorentz_norm",
    "write_field_csv",
    "read_field_csv",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-R, R]^n with N cells per axis (N even)."""

    n: int
    R: float
    N: int

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.n}")
        if not self.R > 0:
            raise ValueError(f"half-width must be positive, got {self.R}")
        if self.N < 2 or self.N % 2:
            raise ValueError(f"cells per axis must be even and >= 2, got {self.N}")

    @classmethod
    def with_spacing(cls, n: int, R: float, h: float) -> "Grid":
        N = int(round(2 * R / h))
        if not math.isclose(N * h, 2 * R, rel_tol=1e-9):
            raise ValueError(f"spacing {h} does not divide [-{R}, {R}]")
        return cls(n, R, N)

    @property
    def h(self) -> float:
        return 2 * self.R / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @cached_property
    def axis(self) -> np.ndarray:
        """Cell centers along one axis."""
        return -self.R + (np.arange(self.N) + 0.5) * self.h

    @cached_property
    def centers(self) -> np.ndarray:
        """Cell centers, shape (size, n)."""
        mesh = np.meshgrid(*([self.axis] * self.n), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def radius(self) -> np.ndarray:
        """Euclidean norm of every cell center (never zero since N is even)."""
        return np.sqrt((self.centers**2).sum(axis=1))

    def to_json(self) -> dict:
        return {"n": self.n, "R": self.R, "N": self.N}

    @classmethod
    def from_json(cls, data: dict) -> "Grid":
        return cls(int(data["n"]), float(data["R"]), int(data["N"]))


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Nonnegative cell values of a function on a grid.

    The sign is dropped on construction, every operator works with |f|.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.abs(np.asarray(self.values, dtype=float)).reshape(-1)
        if v.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def array(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            _same_grid(self, other)
            return ScalarField(self.grid, self.values * other.values)
        return ScalarField(self.grid, self.values * float(other))

    __rmul__ = __mul__

    def __add__(self, other: "ScalarField") -> "ScalarField":
        _same_grid(self, other)
        return ScalarField(self.grid, self.values + other.values)

    def __pow__(self, exponent: float) -> "ScalarField":
        return ScalarField(self.grid, self.values**exponent)

    def restrict(self, cells) -> "ScalarField":
        """The field times the indicator of ``cells``."""
        return ScalarField(self.grid, np.where(_mask(self.grid, cells), self.values, 0.0))


class WeightField(ScalarField):
    """A strictly positive field read as the density of a measure w dx."""

    def __post_init__(self):
        super().__post_init__()
        if self.values.min() <= 0:
            raise ValueError("weights must be strictly positive")

    def __pow__(self, exponent: float) -> "WeightField":
        return WeightField(self.grid, self.values**exponent)

    def __mul__(self, other):
        out = ScalarField.__mul__(self, other)
        if isinstance(other, WeightField) or not isinstance(other, ScalarField):
            return WeightField(out.grid, out.values)
        return out

    __rmul__ = __mul__

    @classmethod
    def ones(cls, grid: Grid) -> "WeightField":
        return cls(grid, np.ones(grid.size))


def _same_grid(a: ScalarField, b: ScalarField):
    if a.grid != b.grid:
        raise ValueError(f"fields live on different grids: {a.grid} vs {b.grid}")


def _mask(grid: Grid, cells) -> np.ndarray:
    """Boolean mask from a mask or an index collection."""
    cells = np.asarray(cells)
    if cells.dtype == bool:
        return cells.reshape(-1)
    mask = np.zeros(grid.size, dtype=bool)
    mask[cells.astype(int).reshape(-1)] = True
    return mask


def weighted_measure(w: WeightField, cells=None) -> float:
    """w(S) = sum over S of w_i h^n; the whole grid when ``cells`` is None."""
    if cells is None:
        return float(w.values.sum() * w.grid.cell_volume)
    return float(w.values[_mask(w.grid, cells)].sum() * w.grid.cell_volume)


def distribution(f: ScalarField, w: WeightField, y: float) -> float:
    """w({|f| > y})."""
    _same_grid(f, w)
    return weighted_measure(w, f.values > y)


@dataclass(frozen=True, eq=False)
class StepRearrangement:
    """Decreasing rearrangement as a step function.

    ``values[k]`` is taken on ``[breakpoints[k], breakpoints[k+1])``.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.breakpoints, t, side="right") - 1
        inside = (t >= 0) & (k < len(self.values))
        return np.where(inside, self.values[np.clip(k, 0, len(self.values) - 1)], 0.0)

    @property
    def total(self) -> float:
        return float(self.breakpoints[-1])


def rearrangement(f: ScalarField, w: WeightField) -> StepRearrangement:
    """f*_w, computed by sorting values and accumulating cell measures.

    Equal values merge into one step, so the step heights are strictly
    decreasing.
    """
    _same_grid(f, w)
    levels, inverse = np.unique(f.values, return_inverse=True)
    mass = np.bincount(inverse, weights=w.values, minlength=len(levels))
    levels, mass = levels[::-1], mass[::-1] * w.grid.cell_volume
    breakpoints = np.concatenate([[0.0], np.cumsum(mass)])
    return StepRearrangement(breakpoints, levels)


def lorentz_p1_norm(f: ScalarField, w: WeightField, p: float) -> float:
    """||f||_{L^{p,1}(w)} = integral of f*(t) t^{1/p - 1} dt, summed exactly per step."""
    if p <= 0:
        raise ValueError("p must be positive")
    r = rearrangement(f, w)
    t = r.breakpoints ** (1.0 / p)
    return float(p * np.sum(r.values * np.diff(t)))


def lorentz_pinf_norm(f: ScalarField, w: WeightField, p: float) -> float:
    """||f||_{L^{p,inf}(w)} = max over steps of v_k * w({|f| >= v_k})^{1/p}."""
    if p <= 0:
        raise ValueError("p must be positive")
    r = rearrangement(f, w)
    return float(np.max(r.values * r.breakpoints[1:] ** (1.0 / p)))


def lp_norm(f: ScalarField, w: WeightField, p: float) -> float:
    if p <= 0:
        raise ValueError("p must be positive")
    _same_grid(f, w)
    total = np.sum(f.values**p * w.values) * w.grid.cell_volume
    return float(total ** (1.0 / p))


@dataclass(frozen=True)
class LorentzIndex:
    """Selects a quasi-norm: q = 1 (Lorentz L^{p,1}), q = p (strong), q = inf (weak).

    ``code`` is ``"1"``, ``"p"`` or ``"inf"``; the exponent may be filled in
    later with :meth:`at`.
    """

    code: str
    p: float | None = None

    def __post_init__(self):
        if self.code not in ("1", "p", "inf"):
            raise ValueError(f"Lorentz second index must be '1', 'p' or 'inf', got {self.code!r}")

    def at(self, p: float) -> "LorentzIndex":
        return LorentzIndex(self.code, p)


def lorentz_norm(f: ScalarField, w: WeightField, index: LorentzIndex) -> float:
    if index.p is None:
        raise ValueError("LorentzIndex has no exponent")
    if index.code == "1":
        return lorentz_p1_norm(f, w, index.p)
    if index.code == "inf":
        return lorentz_pinf_norm(f, w, index.p)
    return lp_norm(f, w, index.p)


def write_field_csv(field: ScalarField, path) -> None:
    """CSV with header ``index,x1[,x2],value``; floats written with repr (exact)."""
    grid = field.grid
    header = ["index"] + [f"x{k + 1}" for k in range(grid.n)] + ["value"]
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for i, (x, v) in enumerate(zip(grid.centers, field.values)):
            out.writerow([i, *map(repr, x.tolist()), repr(float(v))])


def read_field_csv(path, grid: Grid, weight: bool = False) -> ScalarField:
    values = np.zeros(grid.size)
    seen = np.zeros(grid.size, dtype=bool)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            i = int(row["index"])
            values[i] = float(row["value"])
            seen[i] = True
    if not seen.all():
        raise ValueError(f"{path}: {int((~seen).sum())} cells missing")
    return (WeightField if weight else ScalarField)(grid, values)


def write_grid_json(grid: Grid, path) -> None:
    Path(path).write_text(json.dumps(grid.to_json()))


def read_grid_json(path) -> Grid:
    return Grid.from_json(json.loads(Path(path).read_text()))
