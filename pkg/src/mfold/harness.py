"""Numerical checks of the weighted inequalities for M(f) M(g).

Checks with explicit constants (the indicator Holder bound, the delta-weak
Holder bound, Kolmogorov's inequality) must pass on every instance; a failure
there is a bug.  Statements with unspecified constants are judged by
stability of the empirical constant along a sweep; divergence claims become
monotone growth along R-sweeps at a fixed spacing.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .corpus import Instance
from .maximal import WindowFamily, hl_maximal, m_tensor
from .measure import (
    Grid,
    LorentzIndex,
    ScalarField,
    WeightField,
    lorentz_norm,
    lorentz_p1_norm,
    lorentz_pinf_norm,
    lp_norm,
    weighted_measure,
)
from .weights import (
    ConstantReport,
    CounterexampleF,
    CounterexampleG,
    CounterexampleW2,
    Indicator,
    Power,
    ap_constant,
    apr_constant,
    combined_exponent,
    conjugate,
    realize,
    window_weak_norms,
)

SLACK = 1e-9


def default_threads() -> int:
    return max(1, int(os.environ.get("MFOLD_THREADS", "1")))


def parallel_map(fn, items, threads: int | None = None) -> list:
    """Ordered map; results come back in input order regardless of scheduling."""
    threads = threads or default_threads()
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class VerificationReport:
    """One inequality check, LHS <= constant * RHS.

    ``passed`` defaults to the inequality with 1e-9 relative slack; checks
    whose verdict is not a single inequality set it explicitly and put the
    ingredients in ``details``.
    """

    check: str
    lhs: float
    rhs: float
    constant: float
    passed: bool | None = None
    seed: int | None = None
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed is None:
            ok = self.lhs <= self.constant * self.rhs + SLACK * self.rhs
            object.__setattr__(self, "passed", bool(ok))

    @property
    def ratio(self) -> float:
        """LHS / (constant * RHS); 0 when both sides vanish."""
        denom = self.constant * self.rhs
        if denom == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / denom

    @property
    def witness(self) -> dict | None:
        if self.passed:
            return None
        return {"seed": self.seed, **self.params}


REPORT_CSV_HEADER = ["check", "seed", "lhs", "rhs", "constant", "ratio", "pass"]


def _fmt(x) -> str:
    return f"{float(x):.15g}"


def report_row(r: VerificationReport) -> list[str]:
    seed = "" if r.seed is None else str(r.seed)
    return [r.check, seed, _fmt(r.lhs), _fmt(r.rhs), _fmt(r.constant), _fmt(r.ratio), str(int(r.passed))]


def write_reports(reports, path, check: str | None = None) -> dict:
    """Per-instance CSV plus the summary dict (also returned)."""
    reports = list(reports)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(REPORT_CSV_HEADER)
        for r in reports:
            out.writerow(report_row(r))
    return summarize(reports, check)


def summarize(reports, check: str | None = None) -> dict:
    reports = list(reports)
    worst = max(reports, key=lambda r: r.ratio) if reports else None
    return {
        "check": check or (reports[0].check if reports else ""),
        "instances": len(reports),
        "pass": all(r.passed for r in reports),
        "worst_ratio": float(_fmt(worst.ratio)) if worst else 0.0,
        "witness_seed": worst.seed if worst else None,
    }


def write_summary(summary: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def relative_drift(values) -> float:
    """max / min - 1 over a sequence of positive values."""
    v = np.asarray(values, dtype=float)
    return float(v.max() / v.min() - 1)


def strictly_increasing(values) -> bool:
    return bool(np.all(np.diff(np.asarray(values, dtype=float)) > 0))


# -- indicator Holder --------------------------------------------------------


def check_char_holder(E, g: ScalarField, inst: Instance) -> VerificationReport:
    """||chi_E g||_{L^{p,inf}(w)} <= ||chi_E||_{L^{p1,inf}(w1)} ||g||_{L^{p2,inf}(w2)}."""
    indicator = _indicator(inst.grid, E)
    lhs = lorentz_pinf_norm(g.restrict(E), inst.w, inst.p)
    rhs = lorentz_pinf_norm(indicator, inst.w1, inst.p1) * lorentz_pinf_norm(g, inst.w2, inst.p2)
    return VerificationReport("char_holder", lhs, rhs, 1.0, seed=inst.seed, params=_params(inst))


def _indicator(grid: Grid, cells) -> ScalarField:
    mask = np.zeros(grid.size)
    mask[_indices(grid, cells)] = 1.0
    return ScalarField(grid, mask)


def _indices(grid: Grid, cells) -> np.ndarray:
    cells = np.asarray(cells)
    if cells.dtype == bool:
        return np.flatnonzero(cells.reshape(-1))
    return cells.astype(int).reshape(-1)


def _params(inst: Instance) -> dict:
    return {"p1": inst.p1, "p2": inst.p2, "grid": inst.grid.to_json()}


# -- delta-weak Holder -------------------------------------------------------


def _log_constant_q(q, p, delta):
    return math.log(2) + np.log(p / (math.log(2) * (1 - delta) * q * (p - q))) / q


def _log_constant_theta(theta, p, delta):
    inner = -np.log(math.log(2) * (1 - delta) * p * theta * (1 - theta)) / theta
    return math.log(2) + inner / p


def _scan_minimize(fun, upper: float) -> float:
    """Minimum of a unimodal function on (0, upper).

    A 2048-point scan, log-spaced toward both ends of the interval, brackets
    the minimum; golden-section search refines it.
    """
    u = np.concatenate([np.logspace(-6, np.log10(0.5), 1024), 1 - np.logspace(np.log10(0.5), -12, 1024)[1:]])
    x = u * upper
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        y = fun(x)
    k = int(np.nanargmin(y))
    k = min(max(k, 1), len(x) - 2)
    res = minimize_scalar(fun, bracket=(x[k - 1], x[k], x[k + 1]), method="golden", options={"xtol": 1e-12})
    return float(min(res.fun, y[k]))


def weak_holder_constant(p: float, delta: float, both_forms: bool = True) -> float:
    """inf over 0 < q < p of 2 (p / (log 2 (1 - delta) q (p - q)))^{1/q}.

    The same infimum is also computed in the substituted form
    2 (inf over 0 < theta < 1 of (log 2 (1 - delta) p theta (1 - theta))^{-1/theta})^{1/p}
    and the two are required to agree to 1e-8.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if p <= 0:
        raise ValueError("p must be positive")
    log_q = _scan_minimize(lambda q: _log_constant_q(q, p, delta), p)
    if both_forms:
        log_t = _scan_minimize(lambda t: _log_constant_theta(t, p, delta), 1.0)
        if not math.isclose(log_q, log_t, rel_tol=1e-9, abs_tol=1e-9):
            raise ArithmeticError(f"the two forms of C({p}, {delta}) disagree: {log_q} vs {log_t}")
    return math.exp(log_q)


def check_weak_holder(inst: Instance, delta: float) -> VerificationReport:
    """||f g||_{L^{p,inf}(w)} <= C(p, delta) ||f^delta||_{L^{p1,inf}(w1)} ||g||_{L^{p2,inf}(w2)}, f scaled to max 1."""
    top = inst.f.values.max()
    f = inst.f if top == 0 else inst.f * (1.0 / top)
    lhs = lorentz_pinf_norm(f * inst.g, inst.w, inst.p)
    rhs = lorentz_pinf_norm(f**delta, inst.w1, inst.p1) * lorentz_pinf_norm(inst.g, inst.w2, inst.p2)
    const = weak_holder_constant(inst.p, delta)
    return VerificationReport(
        "weak_holder", lhs, rhs, const, seed=inst.seed, params={**_params(inst), "delta": delta}
    )


# -- Kolmogorov --------------------------------------------------------------


def kolmogorov_sup(h: ScalarField, w: WeightField, p: float, q: float) -> float:
    """sup over sets A of ||h chi_A||_{L^q(w)} w(A)^{1/p - 1/q}.

    Exhaustive over all nonempty subsets for grids of at most 16 cells,
    otherwise over the superlevel sets {h >= t}.
    """
    vol = w.grid.cell_volume
    mass = w.values * vol
    power = h.values**q * mass
    if h.grid.size <= 16:
        bits = (np.arange(1, 2**h.grid.size)[:, None] >> np.arange(h.grid.size)) & 1
        bits = bits.astype(float)
    else:
        levels = np.unique(h.values)[::-1]
        bits = (h.values[None, :] >= levels[:, None]).astype(float)
    lq = (bits @ power) ** (1 / q)
    wa = bits @ mass
    return float(np.max(lq * wa ** (1 / p - 1 / q)))


def check_kolmogorov(h: ScalarField, w: WeightField, p: float, q: float, seed=None):
    """Both directions of Kolmogorov's inequality.

    Returns (lower, upper): ||h||_{L^{p,inf}(w)} <= S and
    S <= (p / (p - q))^{1/q} ||h||_{L^{p,inf}(w)}.
    """
    if not 0 < q < p:
        raise ValueError(f"Kolmogorov's inequality needs 0 < q < p, got q={q}, p={p}")
    weak = lorentz_pinf_norm(h, w, p)
    sup = kolmogorov_sup(h, w, p, q)
    params = {"p": p, "q": q, "cells": h.grid.size}
    lower = VerificationReport("kolmogorov_lower", weak, sup, 1.0, seed=seed, params=params)
    upper = VerificationReport(
        "kolmogorov_upper", sup, weak, (p / (p - q)) ** (1 / q), seed=seed, params=params
    )
    return lower, upper


# -- the divergent example ---------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    x: float
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else math.inf


def counterexample_instance(grid: Grid, p1: float, p2: float) -> Instance:
    return Instance(
        realize(CounterexampleF(p1), grid),
        realize(CounterexampleG(p1), grid),
        WeightField.ones(grid),
        realize(CounterexampleW2(p1, p2), grid),
        p1,
        p2,
    )


def counterexample_sweep(p1: float, p2: float, R_list, h: float, n: int = 1) -> list[SweepRow]:
    """||f g||_{L^{p,inf}(w)} against ||f||_{L^{p1,inf}} ||g||_{L^{p2,inf}(w2)} on growing boxes.

    Here f g is the indicator of |x| >= 1 and w decays like |x|^{-n}, so the
    left side grows like (w-mass of the annulus)^{1/p} while the right side
    converges.
    """
    rows = []
    for R in R_list:
        inst = counterexample_instance(Grid.with_spacing(n, R, h), p1, p2)
        lhs = lorentz_pinf_norm(inst.f * inst.g, inst.w, inst.p)
        rhs = lorentz_pinf_norm(inst.f, inst.w1, p1) * lorentz_pinf_norm(inst.g, inst.w2, p2)
        rows.append(SweepRow(float(R), lhs, rhs))
    return rows


# -- bilinear ratios ---------------------------------------------------------


def _families(corpus, windows):
    if windows is not None:
        return lambda grid: windows
    cache: dict = {}

    def get(grid):
        if grid not in cache:
            cache[grid] = WindowFamily(grid)
        return cache[grid]

    return get


def bilinear_ratios(corpus, inputs=("1", "1"), output="inf", windows=None, threads=None) -> list[float]:
    """||M(f) M(g)||_out / (||f||_in1 ||g||_in2) per instance; NaN where the denominator vanishes."""
    family = _families(corpus, windows)
    in1, in2 = LorentzIndex(inputs[0]), LorentzIndex(inputs[1])
    out = LorentzIndex(output)

    def one(inst: Instance) -> float:
        denom = lorentz_norm(inst.f, inst.w1, in1.at(inst.p1)) * lorentz_norm(inst.g, inst.w2, in2.at(inst.p2))
        if denom == 0:
            return math.nan
        prod = m_tensor(inst.f, inst.g, family(inst.grid))
        return lorentz_norm(prod, inst.w, out.at(inst.p)) / denom

    return parallel_map(one, corpus, threads)


def estimate_bilinear_norm(corpus, inputs=("1", "1"), output="inf", windows=None, threads=None) -> ConstantReport:
    """Largest ratio ||M(f)M(g)||_out / (||f||_in1 ||g||_in2) over the corpus.

    Index codes are "1" (Lorentz L^{p,1}), "p" (strong) and "inf" (weak);
    exponents come from each instance.  Zero denominators are skipped and
    counted.  The witness is (corpus position, instance seed).
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    ratios = np.array(bilinear_ratios(corpus, inputs, output, windows, threads))
    valid = ~np.isnan(ratios)
    skipped = int((~valid).sum())
    if not valid.any():
        return ConstantReport("bilinear", 0.0, (-1, -1), len(corpus), skipped=skipped)
    k = int(np.nanargmax(ratios))
    seed = corpus[k].seed if corpus[k].seed is not None else -1
    return ConstantReport("bilinear", float(ratios[k]), (k, seed), len(corpus), corpus[k].p, skipped)


# -- cube tests for the restricted weak type classes -------------------------


def _cube_lhs(Mg: ScalarField, w: WeightField, p: float, windows: WindowFamily, target: str) -> np.ndarray:
    """||chi_Q Mg|| in L^{p,inf}(w) or L^p(w) for every window Q."""
    if target == "weak":
        return window_weak_norms(Mg, w, 1.0 / p, windows)
    return (windows.sums(Mg.values**p * w.values) * w.grid.cell_volume) ** (1.0 / p)


def _single_window_lhs(Mg: ScalarField, w: WeightField, p: float, mask: np.ndarray, target: str) -> float:
    part = Mg.restrict(mask)
    return lorentz_pinf_norm(part, w, p) if target == "weak" else lp_norm(part, w, p)


def set_test_ratio(E, g: ScalarField, w1, w2, p1, p2, target="weak", input_norm="1", windows=None) -> float:
    """||chi_E Mg||_target(w) / (w1(E)^{1/p1} ||g||_input(w2)) for an arbitrary set E."""
    p = combined_exponent(p1, p2)
    w = w1 ** (p / p1) * w2 ** (p / p2)
    mask = np.zeros(g.grid.size, dtype=bool)
    mask[_indices(g.grid, E)] = True
    denom = weighted_measure(w1, mask) ** (1 / p1) * lorentz_norm(g, w2, LorentzIndex(input_norm, p2))
    if denom == 0:
        return 0.0
    return _single_window_lhs(hl_maximal(g, windows), w, p, mask, target) / denom


def average_domination_violations(g: ScalarField, Mg: ScalarField, mask: np.ndarray) -> int:
    """Cells of Q where Mg < (avg_Q g) chi_Q, beyond rounding."""
    avg = g.values[mask].mean()
    return int(np.sum(Mg.values[mask] < avg * (1 - 1e-12)))


def _dual_windows(windows: WindowFamily, witness_window: int, count: int, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    largest = np.argsort(-windows.cell_counts, kind="stable")[: max(1, count // 4)]
    picks = [witness_window, *largest.tolist()]
    extra = rng.choice(windows.size, size=min(windows.size, count), replace=False)
    picks += extra.tolist()
    return list(dict.fromkeys(int(k) for k in picks))[:count]


def _duals_for_window(w2: WeightField, p2: float, mask: np.ndarray, kind: str) -> list[ScalarField]:
    """Near-extremal test functions for a window.

    ``kind="apr"``: restrictions of w2^{-1} and indicators to superlevel sets
    of chi_Q w2^{-1}, at the level attaining the L^{p2',inf}(w2) norm and a
    few quantiles.  ``kind="ap"``: w2^{1-p2'} chi_Q.
    """
    grid = w2.grid
    inv = np.where(mask, 1.0 / w2.values, 0.0)
    if kind == "ap":
        if p2 == 1:
            k = np.flatnonzero(mask)[np.argmax(inv[mask])]
            return [ScalarField(grid, (np.arange(grid.size) == k).astype(float))]
        return [ScalarField(grid, np.where(mask, w2.values ** (1 - conjugate(p2)), 0.0))]
    levels = np.unique(inv[mask])[::-1]
    mass = np.array([w2.values[mask & (inv >= t)].sum() for t in levels])
    exponent = 0.0 if p2 == 1 else 1 / conjugate(p2)
    best = int(np.argmax(levels * mass**exponent))
    picks = {best, 0, len(levels) - 1, len(levels) // 2}
    out = []
    for k in sorted(picks):
        F = mask & (inv >= levels[k])
        out.append(ScalarField(grid, F.astype(float)))
        out.append(ScalarField(grid, np.where(F, inv, 0.0)))
    return out


def _cube_test(w1, w2, p1, p2, windows, g_corpus, target, input_norm, dual_kind, dual_count, seed, K1, K1_witness):
    windows = windows or WindowFamily(w1.grid)
    p = combined_exponent(p1, p2)
    w = w1 ** (p / p1) * w2 ** (p / p2)
    vol = w1.grid.cell_volume
    w1Q = (windows.sums(w1.values) * vol) ** (1 / p1)
    idx = LorentzIndex(input_norm, p2)

    best, best_at = 0.0, None
    for j, g in enumerate(g_corpus):
        gn = lorentz_norm(g, w2, idx)
        if gn == 0:
            continue
        r = _cube_lhs(hl_maximal(g, windows), w, p, windows, target) / (w1Q * gn)
        k = int(np.argmax(r))
        if r[k] > best:
            best, best_at = float(r[k]), ("corpus", j, k)

    violations, dual_best = 0, 0.0
    for k in _dual_windows(windows, K1_witness, dual_count, seed):
        mask = windows.mask(k)
        for g in _duals_for_window(w2, p2, mask, dual_kind):
            Mg = hl_maximal(g, windows)
            violations += average_domination_violations(g, Mg, mask)
            gn = lorentz_norm(g, w2, idx)
            r = _single_window_lhs(Mg, w, p, mask, target) / (w1Q[k] * gn)
            dual_best = max(dual_best, r)
            if r > best:
                best, best_at = r, ("dual", k)
    return best, best_at, violations, dual_best


def _window_of(report: ConstantReport, windows: WindowFamily) -> int:
    lo, hi = report.witness
    for k in range(windows.size):
        if windows.corners(k) == (lo, hi):
            return k
    return 0


def check_prop_apr(
    w1: WeightField,
    w2: WeightField,
    p1: float,
    p2: float,
    windows: WindowFamily | None = None,
    g_corpus=(),
    band=(1e-3, 1e3),
    dual_count: int = 16,
    seed: int = 0,
) -> VerificationReport:
    """Cube test constant K3 against [w2]_{A_p2^R} = K1.

    K3 = max over windows Q and test functions g of
    ||chi_Q Mg||_{L^{p,inf}(w)} / (w1(Q)^{1/p1} ||g||_{L^{p2,1}(w2)}),
    with g ranging over ``g_corpus`` and the near-extremal duals of sampled
    windows.  Passes when both are finite, K3 / K1 lies in ``band`` and
    Mg >= (avg_Q g) chi_Q held for every dual.
    """
    windows = windows or WindowFamily(w1.grid)
    k1 = apr_constant(w2, p2, windows)
    K3, at, violations, dual_best = _cube_test(
        w1, w2, p1, p2, windows, list(g_corpus), "weak", "1", "apr", dual_count, seed, k1.value,
        _window_of(k1, windows),
    )
    return _band_report("prop_apr", K3, k1.value, band, violations, at, dual_best, seed, p1, p2)


def check_prop_strong(
    variant: str,
    w1: WeightField,
    w2: WeightField,
    p1: float,
    p2: float,
    windows: WindowFamily | None = None,
    g_corpus=(),
    band=(1e-3, 1e3),
    dual_count: int = 16,
    seed: int = 0,
) -> VerificationReport:
    """Cube test with strong L^{p2}(w2) inputs against [w2]_{A_p2}^{1/p2}.

    ``variant="weak-target"`` measures chi_Q Mg in L^{p,inf}(w);
    ``variant="strong-target"`` in L^p(w) and requires p2 > 1.
    """
    if variant not in ("weak-target", "strong-target"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "strong-target" and p2 <= 1:
        raise ValueError("the strong-target cube test needs p2 > 1")
    windows = windows or WindowFamily(w1.grid)
    ap = ap_constant(w2, p2, windows)
    K1 = ap.value ** (1 / p2)
    target = "weak" if variant == "weak-target" else "strong"
    K3, at, violations, dual_best = _cube_test(
        w1, w2, p1, p2, windows, list(g_corpus), target, "p", "ap", dual_count, seed, K1,
        _window_of(ap, windows) if ap.name == "ap" else 0,
    )
    name = "prop_strong_weak" if target == "weak" else "prop_strong_strong"
    return _band_report(name, K3, K1, band, violations, at, dual_best, seed, p1, p2)


def _band_report(name, K3, K1, band, violations, at, dual_best, seed, p1, p2) -> VerificationReport:
    finite = math.isfinite(K3) and math.isfinite(K1) and K1 > 0
    ok = finite and band[0] <= K3 / K1 <= band[1] and violations == 0
    return VerificationReport(
        name,
        K3,
        K1,
        band[1],
        passed=bool(ok),
        seed=seed,
        params={"p1": p1, "p2": p2, "band": list(band)},
        details={"K3": K3, "K1": K1, "violations": violations, "attained": at, "dual_best": dual_best},
    )


# -- indicator x function boundedness ----------------------------------------


def default_delta(p1: float) -> float:
    """delta with p1 * delta halfway between 1 and p1."""
    if p1 <= 1:
        raise ValueError("needs p1 > 1")
    return (1 + p1) / (2 * p1)


def check_indicator_product(E, g: ScalarField, inst: Instance, delta: float, windows=None) -> VerificationReport:
    """||M(chi_E) M(g)||_{L^{p,inf}(w)} against ||chi_E||_{L^{p1,1}(w1)} ||g||_{L^{p2,1}(w2)}.

    The constant is the proof's chain measured on the grid:
    C(p, delta) * Ka^delta * Kb * (p1 delta)^delta / p1, where
    Ka = ||M chi_E||_{L^{p1 delta,inf}(w1)} / ||chi_E||_{L^{p1 delta,1}(w1)} and
    Kb = ||Mg||_{L^{p2,inf}(w2)} / ||g||_{L^{p2,1}(w2)}.  The last factor
    converts ||chi_E||^delta_{L^{p1 delta,1}} into ||chi_E||_{L^{p1,1}}.
    """
    if inst.p1 <= 1:
        raise ValueError("needs p1 > 1")
    if not 1 / inst.p1 < delta < 1:
        raise ValueError("needs p1 * delta > 1 and delta < 1")
    grid = inst.grid
    windows = windows or WindowFamily(grid)
    chi = _indicator(grid, E)
    if ap_constant(inst.w1, inst.p1 * delta, windows).value == math.inf:
        raise ValueError("w1 is not in A_{p1 delta} on this window family")
    Mchi, Mg = hl_maximal(chi, windows), hl_maximal(g, windows)
    lhs = lorentz_pinf_norm(Mchi * Mg, inst.w, inst.p)
    rhs = lorentz_p1_norm(chi, inst.w1, inst.p1) * lorentz_p1_norm(g, inst.w2, inst.p2)
    q1 = inst.p1 * delta
    chi_n = lorentz_p1_norm(chi, inst.w1, q1)
    g_n = lorentz_p1_norm(g, inst.w2, inst.p2)
    Ka = lorentz_pinf_norm(Mchi, inst.w1, q1) / chi_n if chi_n else 0.0
    Kb = lorentz_pinf_norm(Mg, inst.w2, inst.p2) / g_n if g_n else 0.0
    C = weak_holder_constant(inst.p, delta)
    const = C * Ka**delta * Kb * q1**delta / inst.p1
    return VerificationReport(
        "indicator_product",
        lhs,
        rhs,
        const,
        seed=inst.seed,
        params={**_params(inst), "delta": delta},
        details={"C": C, "Ka": Ka, "Kb": Kb, "ratio": lhs / rhs if rhs else 0.0},
    )


# -- endpoint L^1 x L^1 -> L^{1/2,inf} ----------------------------------------


def check_endpoint_half(corpus, windows=None, threads=None) -> ConstantReport:
    """max ||M(f)M(g)||_{L^{1/2,inf}(w)} / (||f||_{L^1(w1)} ||g||_{L^1(w2)})."""
    corpus = list(corpus)
    if any(inst.p1 != 1 or inst.p2 != 1 for inst in corpus):
        raise ValueError("the endpoint check needs p1 = p2 = 1")
    return estimate_bilinear_norm(corpus, ("p", "p"), "inf", windows, threads)


def endpoint_sweep(R_list, h: float, weight_specs, function_specs, n: int = 1, threads=None) -> list[SweepRow]:
    """Endpoint ratio as the box grows; x = R, lhs = ratio, rhs = 1."""
    rows = []
    for R in R_list:
        grid = Grid.with_spacing(n, R, h)
        w1, w2 = (realize(s, grid) for s in weight_specs)
        corpus = [
            Instance(realize(a, grid), realize(b, grid), w1, w2, 1.0, 1.0, k)
            for k, (a, b) in enumerate(function_specs)
        ]
        rows.append(SweepRow(float(R), check_endpoint_half(corpus, threads=threads).value, 1.0))
    return rows


# -- necessity ---------------------------------------------------------------


def indicator_domination_violations(E, windows: WindowFamily) -> int:
    """Cells where chi_E > M chi_E."""
    grid = windows.grid
    chi = _indicator(grid, E)
    return int(np.sum(chi.values > hl_maximal(chi, windows).values))


def check_indicator_domination(E, windows: WindowFamily, seed=None) -> VerificationReport:
    bad = indicator_domination_violations(E, windows)
    return VerificationReport("indicator_domination", float(bad), 0.0, 1.0, seed=seed)


def necessity_witnesses(grid: Grid, w_bad: WeightField, p_bad: float, seed: int = 0) -> list[tuple[ScalarField, ScalarField]]:
    """(chi_Q, g) pairs with g near-extremal for [w_bad]_{A^R} on Q, plus random pairs."""
    windows = WindowFamily(grid)
    rep = apr_constant(w_bad, p_bad, windows)
    k = _window_of(rep, windows)
    pairs = []
    for kk in sorted({k, windows.size - 1}):
        mask = windows.mask(kk)
        chi = ScalarField(grid, mask.astype(float))
        pairs += [(chi, g) for g in _duals_for_window(w_bad, p_bad, mask, "apr")]
    return pairs + fixed_pairs(grid)


def fixed_pairs(grid: Grid) -> list[tuple[ScalarField, ScalarField]]:
    """Pairs supported in a fixed region, identical on every box that contains it."""
    unit, centered, far = Indicator(0.0, 1.0), Indicator(-1.0, 1.0), Indicator(2.0, 3.0)
    out = [(unit, unit), (centered, far), (unit, centered)]
    pairs = [(realize(a, grid), realize(b, grid)) for a, b in out]
    spike = realize(centered, grid) * realize(Power(-0.25), grid)
    pairs.append((spike, realize(unit, grid)))
    return [(f, g) for f, g in pairs if f.values.any() and g.values.any()]


def check_necessity(
    R_list, p1: float, p2: float, h: float, swap: bool = False, seed: int = 0, threads=None
) -> tuple[VerificationReport, list[tuple[float, float, float]]]:
    """Divergence of [w2]_{A_p2^R} and of the restricted weak type ratio together.

    w1 = 1 and w2 is the divergent power weight (roles exchanged when
    ``swap``).  Returns the verdict and rows (R, K1, bilinear ratio); it
    passes when both columns increase strictly along the sweep.
    """
    rows = []
    for R in R_list:
        grid = Grid.with_spacing(1, R, h)
        if swap:
            w_bad = realize(CounterexampleW2(p2, p1), grid)
            K1 = apr_constant(w_bad, p1).value
            pairs = necessity_witnesses(grid, w_bad, p1, seed)
            corpus = [Instance(g, chi, w_bad, WeightField.ones(grid), p1, p2, seed) for chi, g in pairs]
        else:
            w_bad = realize(CounterexampleW2(p1, p2), grid)
            K1 = apr_constant(w_bad, p2).value
            pairs = necessity_witnesses(grid, w_bad, p2, seed)
            corpus = [Instance(chi, g, WeightField.ones(grid), w_bad, p1, p2, seed) for chi, g in pairs]
        ratio = estimate_bilinear_norm(corpus, ("1", "1"), "inf", threads=threads).value
        rows.append((float(R), K1, ratio))
    k1s = [r[1] for r in rows]
    ratios = [r[2] for r in rows]
    ok = strictly_increasing(k1s) and strictly_increasing(ratios)
    report = VerificationReport(
        "necessity_swapped" if swap else "necessity",
        ratios[-1],
        ratios[0],
        1.0,
        passed=ok,
        seed=seed,
        params={"p1": p1, "p2": p2, "h": h, "R": list(map(float, R_list))},
        details={"K1": k1s, "ratio": ratios},
    )
    return report, rows


def strong_type_sweep(R_list, p1, p2, h, weight_pair, output="p", seed=0, threads=None) -> list[SweepRow]:
    """Strong-input bilinear ratio along an R-sweep; x = R, lhs = ratio, rhs = 1.

    ``weight_pair`` is (spec1, spec2).  The corpus holds A_p dual pairs for
    the whole box and the largest-ratio window of w2, structured functions
    and random pairs.
    """
    rows = []
    for R in R_list:
        grid = Grid.with_spacing(1, R, h)
        w1, w2 = (realize(s, grid) for s in weight_pair)
        windows = WindowFamily(grid)
        rep = ap_constant(w2, p2, windows)
        pairs = []
        for k in sorted({_window_of(rep, windows), windows.size - 1}):
            mask = windows.mask(k)
            chi = ScalarField(grid, mask.astype(float))
            for g in _duals_for_window(w2, p2, mask, "ap"):
                pairs.append((chi, g))
        corpus = [Instance(f, g, w1, w2, p1, p2, seed) for f, g in pairs + fixed_pairs(grid)]
        value = estimate_bilinear_norm(corpus, ("p", "p"), output, windows, threads).value
        rows.append(SweepRow(float(R), value, 1.0))
    return rows


CHECKS = {
    "char_holder": "indicator Holder bound with constant 1",
    "weak_holder": "delta-weak Holder bound with constant C(p, delta)",
    "kolmogorov": "two-sided Kolmogorov inequality",
    "cube_comparability": "Holder lower bound and stability of the cube ratio",
    "weight_identities": "constants of w = 1 and A_p^R <= A_p^{1/p}",
    "indicator_product": "indicator x function bound through the proof chain",
    "endpoint_half": "L^1 x L^1 -> L^{1/2,inf} ratio stability",
    "prop_apr": "cube test against the A_p^R constant",
    "prop_strong": "cube test against the A_p constant",
    "necessity": "co-divergence of A_p^R constant and bilinear ratio",
    "indicator_domination": "chi_E <= M chi_E",
}
