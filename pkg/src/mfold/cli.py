"""Manifest-driven command line front end.

    mfold run manifest.json [--seed-override N] [--threads K]
    mfold --list-checks

Exit status: 0 when every verify task passes, 2 when a check fails, 1 on
invalid input.  The manifest schema is documented in manifests/README.md.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import harness as hz
from .corpus import Instance, random_instance, random_set, random_weight, structured_functions
from .maximal import WindowFamily, calderon_maximal_1d, hl_maximal, m_tensor
from .measure import Grid, LorentzIndex, ScalarField, WeightField, lorentz_norm, write_field_csv
from .weights import (
    CONSTANT_CSV_HEADER,
    WEIGHT_SPECS,
    CounterexampleW2,
    a1_constant,
    ap_constant,
    apr_constant,
    cube_comparability,
    realize,
    rh_constant,
    spec_from_json,
)

TASK_KINDS = ("norm", "maximal", "constant", "verify", "counterexample", "sweep")
SWEEP_QUANTITIES = ("apr", "ap", "endpoint", "necessity", "strong_type", "cube_comparability")


class ManifestError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


# -- plot data ---------------------------------------------------------------


def emit_plotdata(rows, path) -> None:
    """CSV ``x,lhs,rhs,ratio``; the ratio is recomputed here from lhs and rhs."""
    rows = [(r.x, r.lhs, r.rhs) if isinstance(r, hz.SweepRow) else tuple(r) for r in rows]
    if not rows:
        raise ValueError("refusing to write an empty sweep table")
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["x", "lhs", "rhs", "ratio"])
        for x, lhs, rhs in rows:
            ratio = lhs / rhs if rhs else float("inf")
            out.writerow([hz._fmt(x), hz._fmt(lhs), hz._fmt(rhs), hz._fmt(ratio)])


# -- manifest parsing --------------------------------------------------------


@dataclass
class Task:
    index: int
    line: int | None
    data: dict

    def get(self, key, default=None):
        return self.data.get(key, default)

    def require(self, key):
        if key not in self.data:
            raise ManifestError(f"task {self.index} ({self.data.get('kind')}): missing '{key}'", self.line)
        return self.data[key]

    def fail(self, message):
        raise ManifestError(f"task {self.index} ({self.data.get('kind')}): {message}", self.line)


def load_manifest(path) -> tuple[dict, list[Task]]:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(data, dict) or not isinstance(data.get("tasks"), list):
        raise ManifestError("manifest must be an object with a 'tasks' list", 1)
    # the k-th "kind" key in the text belongs to the k-th task
    kind_lines = [text.count("\n", 0, m.start()) + 1 for m in re.finditer(r'"kind"\s*:', text)]
    tasks = []
    for i, t in enumerate(data["tasks"]):
        line = kind_lines[i] if i < len(kind_lines) else None
        if not isinstance(t, dict):
            raise ManifestError(f"task {i} is not an object", line)
        if "w" in t and "weight" not in t:
            t["weight"] = t.pop("w")
        tasks.append(Task(i, line, t))
    return data, tasks


def _grid_for(task: Task, manifest: dict) -> Grid:
    spec = task.get("grid", manifest.get("grid"))
    if spec is None:
        task.fail("no grid given (task or manifest level)")
    try:
        if "h" in spec:
            return Grid.with_spacing(int(spec["n"]), float(spec["R"]), float(spec["h"]))
        return Grid.from_json(spec)
    except (KeyError, TypeError, ValueError) as exc:
        task.fail(f"bad grid {spec}: {exc}")


def _spec(task: Task, key: str, weight: bool = False):
    raw = task.require(key)
    try:
        spec = spec_from_json(raw)
    except (TypeError, ValueError) as exc:
        task.fail(f"bad field spec for '{key}': {exc}")
    if weight and type(spec).__name__ not in WEIGHT_SPECS:
        task.fail(f"'{key}' must be a weight spec, got {type(spec).__name__}")
    return spec


def _positive(task: Task, key: str, default=None, minimum=0.0, strict=True):
    value = task.get(key, default)
    if value is None:
        task.require(key)
    try:
        value = float(value)
    except (TypeError, ValueError):
        task.fail(f"'{key}' must be a number")
    if value < minimum or (strict and value == minimum):
        task.fail(f"'{key}' must be {'>' if strict else '>='} {minimum}, got {value}")
    return value


def validate(manifest: dict, tasks: list[Task]) -> None:
    """Full validation before anything runs, so invalid input writes nothing."""
    for task in tasks:
        kind = task.require("kind")
        if kind not in TASK_KINDS:
            task.fail(f"unknown kind '{kind}'; expected one of {', '.join(TASK_KINDS)}")
        task.require("output")
        if kind in ("norm", "maximal", "constant", "verify"):
            _grid_for(task, manifest)
        if kind == "norm":
            _spec(task, "function")
            _spec(task, "weight", weight=True)
            _positive(task, "p")
            for code in _as_list(task.get("index", ["1", "p", "inf"])):
                if code not in ("1", "p", "inf"):
                    task.fail(f"unknown norm index {code!r}")
        elif kind == "maximal":
            _spec(task, "function")
            op = task.get("operator", "hl")
            if op not in ("hl", "tensor", "calderon"):
                task.fail(f"unknown operator {op!r}")
            if op != "hl":
                _spec(task, "second")
        elif kind == "constant":
            name = task.require("constant")
            if name not in CONSTANTS:
                task.fail(f"unknown constant {name!r}; expected one of {', '.join(CONSTANTS)}")
            _spec(task, "weight", weight=True)
            if name == "rh":
                _positive(task, "s", minimum=1.0)
            elif name != "a1":
                _positive(task, "p", minimum=1.0, strict=False)
        elif kind == "verify":
            check = task.require("check")
            if check not in VERIFY:
                task.fail(f"unknown check {check!r}; see --list-checks")
            if "seed" not in task.data:
                task.fail("verify tasks are randomized and need a 'seed'")
            if check == "kolmogorov":
                for pair in task.get("pq", [[1, 0.5], [2, 1], [2 / 3, 0.5]]):
                    p, q = map(float, pair)
                    if not 0 < q < p:
                        task.fail(f"Kolmogorov needs 0 < q < p, got p={p}, q={q}")
                if int(task.get("cells", 12)) > 16:
                    task.fail("exhaustive Kolmogorov check is limited to 16 cells")
        elif kind == "counterexample":
            _positive(task, "p1")
            _positive(task, "p2")
            _positive(task, "h")
            if not _as_list(task.require("R")):
                task.fail("'R' must be a nonempty list")
        elif kind == "sweep":
            q = task.require("quantity")
            if q not in SWEEP_QUANTITIES:
                task.fail(f"unknown sweep quantity {q!r}")
            if not _as_list(task.require("R" if q != "cube_comparability" else "N")):
                task.fail("sweep list must be nonempty")


def _as_list(x):
    return x if isinstance(x, list) else [x]


# -- task runners ------------------------------------------------------------

CONSTANTS = {"ap": ap_constant, "a1": a1_constant, "apr": apr_constant, "rh": rh_constant}


def _windows(task: Task, grid: Grid) -> WindowFamily:
    return WindowFamily(grid, task.get("windows", "auto"))


def run_norm(task, grid, ctx):
    f = realize(_spec(task, "function"), grid)
    w = realize(_spec(task, "weight", weight=True), grid)
    p = float(task.require("p"))
    with open(task.require("output"), "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["index", "p", "value"])
        for code in _as_list(task.get("index", ["1", "p", "inf"])):
            out.writerow([code, hz._fmt(p), hz._fmt(lorentz_norm(f, w, LorentzIndex(code, p)))])
    return True


def run_maximal(task, grid, ctx):
    f = realize(_spec(task, "function"), grid)
    op = task.get("operator", "hl")
    if op == "hl":
        out = hl_maximal(f, _windows(task, grid))
    elif op == "tensor":
        out = m_tensor(f, realize(_spec(task, "second"), grid), _windows(task, grid))
    else:
        out = calderon_maximal_1d(f, realize(_spec(task, "second"), grid))
    write_field_csv(out, task.require("output"))
    return True


def run_constant(task, grid, ctx):
    name = task.require("constant")
    w = realize(_spec(task, "weight", weight=True), grid)
    windows = _windows(task, grid)
    if name == "a1":
        rep = a1_constant(w, windows)
    elif name == "rh":
        rep = rh_constant(w, float(task.require("s")), windows)
    else:
        rep = CONSTANTS[name](w, float(task.require("p")), windows)
    with open(task.require("output"), "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(CONSTANT_CSV_HEADER)
        out.writerow(rep.csv_row())
    return True


def run_counterexample(task, grid, ctx):
    rows = hz.counterexample_sweep(
        float(task.require("p1")), float(task.require("p2")), task.require("R"), float(task.require("h"))
    )
    emit_plotdata(rows, task.require("output"))
    return True


def run_sweep(task, grid, ctx):
    q = task.require("quantity")
    h = float(task.get("h", 0.5))
    p1, p2 = float(task.get("p1", 2.0)), float(task.get("p2", 2.0))
    if q in ("apr", "ap"):
        spec = _spec(task, "weight", weight=True)
        p = float(task.require("p"))
        fn = apr_constant if q == "apr" else ap_constant
        rows = [(R, fn(realize(spec, Grid.with_spacing(1, R, h)), p).value, 1.0) for R in task.require("R")]
    elif q == "endpoint":
        ws = [spec_from_json(s) for s in task.require("weights")]
        fs = [tuple(spec_from_json(s) for s in pair) for pair in task.require("functions")]
        rows = hz.endpoint_sweep(task.require("R"), h, ws, fs, threads=ctx["threads"])
    elif q == "necessity":
        _, table = hz.check_necessity(task.require("R"), p1, p2, h, bool(task.get("swap", False)), threads=ctx["threads"])
        rows = [(R, ratio, k1) for R, k1, ratio in table]
    elif q == "strong_type":
        ws = tuple(spec_from_json(s) for s in task.require("weights"))
        rows = hz.strong_type_sweep(task.require("R"), p1, p2, h, ws, task.get("output_index", "p"), threads=ctx["threads"])
    else:
        ws = [spec_from_json(s) for s in task.require("weights")]
        rows = []
        for N in task.require("N"):
            g = Grid(1, float(task.get("R_fixed", 8.0)), int(N))
            c = cube_comparability(realize(ws[0], g), realize(ws[1], g), p1, p2)
            rows.append((N, c.max_ratio, c.min_ratio))
    emit_plotdata(rows, task.require("output"))
    return True


def run_verify(task, grid, ctx):
    reports = VERIFY[task.require("check")](task, grid, int(task.require("seed")), ctx["threads"])
    summary = hz.write_reports(reports, task.require("output"), task.require("check"))
    hz.write_summary(summary, _summary_path(task.require("output")))
    return summary["pass"]


def _summary_path(output) -> Path:
    out = Path(output)
    return out.with_name(out.stem + ".summary.json")


# -- verify suites -----------------------------------------------------------


def _instances(task, grid, seed, p_range=(1.0, 4.0)):
    n = int(task.get("instances", 100))
    lo, hi = task.get("p_range", p_range)
    return [random_instance(seed + i, grid, (float(lo), float(hi))) for i in range(n)]


def verify_char_holder(task, grid, seed, threads):
    def one(inst):
        E = random_set(np.random.default_rng([inst.seed, 1]), grid)
        return hz.check_char_holder(E, inst.g, inst)

    return hz.parallel_map(one, _instances(task, grid, seed), threads)


def verify_weak_holder(task, grid, seed, threads):
    deltas = [float(d) for d in task.get("deltas", [0.3, 0.5, 0.9])]
    insts = _instances(task, grid, seed)
    return hz.parallel_map(lambda job: hz.check_weak_holder(*job), [(i, d) for i in insts for d in deltas], threads)


def verify_kolmogorov(task, grid, seed, threads):
    cells = int(task.get("cells", 12))
    g = Grid(1, cells / 2, cells)
    reports = []
    for i in range(int(task.get("instances", 100))):
        rng = np.random.default_rng(seed + i)
        h = ScalarField(g, rng.pareto(1.2, cells) * (rng.random(cells) < 0.8))
        w = WeightField(g, rng.uniform(0.1, 10.0, cells))
        for p, q in task.get("pq", [[1, 0.5], [2, 1], [2 / 3, 0.5]]):
            reports += hz.check_kolmogorov(h, w, float(p), float(q), seed=seed + i)
    return reports


def verify_indicator_product(task, grid, seed, threads):
    def one(inst):
        E = random_set(np.random.default_rng([inst.seed, 1]), grid)
        return hz.check_indicator_product(E, inst.g, inst, float(task.get("delta", hz.default_delta(inst.p1))))

    return hz.parallel_map(one, _instances(task, grid, seed, (1.2, 4.0)), threads)


def verify_cube_comparability(task, grid, seed, threads):
    reports = []
    for inst in _instances(task, grid, seed):
        c = cube_comparability(inst.w1, inst.w2, inst.p1, inst.p2)
        reports.append(hz.VerificationReport("cube_comparability", 1.0, c.min_ratio, 1.0, seed=inst.seed))
    return reports


def verify_weight_identities(task, grid, seed, threads):
    reports = []
    ones = WeightField.ones(grid)
    for name, fn, arg in (("ap", ap_constant, 2.0), ("apr", apr_constant, 2.0), ("rh", rh_constant, 2.0)):
        v = fn(ones, arg).value
        reports.append(hz.VerificationReport(f"unit_{name}", v, 1.0, 1.0, passed=v == 1.0, seed=seed))
    v = a1_constant(ones).value
    reports.append(hz.VerificationReport("unit_a1", v, 1.0, 1.0, passed=v == 1.0, seed=seed))
    for i in range(int(task.get("instances", 100))):
        rng = np.random.default_rng(seed + i)
        w = random_weight(rng, grid)
        p = float(rng.choice(task.get("ps", [1.5, 2.0, 3.0])))
        reports.append(
            hz.VerificationReport("apr_le_ap", apr_constant(w, p).value, ap_constant(w, p).value ** (1 / p), 1.0, seed=seed + i)
        )
    return reports


def verify_indicator_domination(task, grid, seed, threads):
    windows = WindowFamily(grid)
    return [
        hz.check_indicator_domination(random_set(np.random.default_rng(seed + i), grid), windows, seed + i)
        for i in range(int(task.get("instances", 100)))
    ]


def verify_endpoint_half(task, grid, seed, threads):
    ws = [spec_from_json(s) for s in task.get("weights", [{"tag": "Constant", "c": 1.0}] * 2)]
    pairs = task.get("functions", [[{"tag": "Indicator", "lo": 0.0, "hi": 1.0}] * 2])
    fs = [tuple(spec_from_json(s) for s in pair) for pair in pairs]
    rows = hz.endpoint_sweep(task.get("R", [16, 32, 64, 128, 256]), float(task.get("h", 0.25)), ws, fs, threads=threads)
    values = [r.lhs for r in rows]
    tol = float(task.get("tolerance", 0.10))
    return [hz.VerificationReport("endpoint_half", max(values), min(values), 1 + tol, seed=seed)]


def verify_prop(task, grid, seed, threads, strong=False):
    R_list = task.get("R", [4, 8, 16, 32])
    h = float(task.get("h", 0.5))
    p1, p2 = float(task.get("p1", 2.0)), float(task.get("p2", 2.0))
    variant = task.get("variant", "strong-target")
    reports, bad = [], []
    for R in R_list:
        g = Grid.with_spacing(1, R, h)
        one, w2 = WeightField.ones(g), realize(CounterexampleW2(p1, p2), g)
        corpus = structured_functions(g, p1)
        for w in (one, w2):
            if strong:
                r = hz.check_prop_strong(variant, one, w, p1, p2, g_corpus=corpus, seed=seed)
            else:
                r = hz.check_prop_apr(one, w, p1, p2, g_corpus=corpus, seed=seed)
            reports.append(r)
        bad.append((r.lhs, r.rhs))
    k3, k1 = zip(*bad)
    trend = hz.strictly_increasing(k3) and hz.strictly_increasing(k1)
    name = "prop_strong_trend" if strong else "prop_apr_trend"
    reports.append(hz.VerificationReport(name, k3[-1], k3[0], 1.0, passed=trend, seed=seed))
    return reports


def verify_necessity(task, grid, seed, threads):
    R_list = task.get("R", [8, 16, 32, 64])
    h = float(task.get("h", 0.5))
    p1, p2 = float(task.get("p1", 2.0)), float(task.get("p2", 2.0))
    out = []
    for swap in (False, True):
        rep, _ = hz.check_necessity(R_list, p1, p2, h, swap=swap, seed=seed, threads=threads)
        out.append(rep)
    return out


VERIFY = {
    "char_holder": verify_char_holder,
    "weak_holder": verify_weak_holder,
    "kolmogorov": verify_kolmogorov,
    "indicator_product": verify_indicator_product,
    "cube_comparability": verify_cube_comparability,
    "weight_identities": verify_weight_identities,
    "indicator_domination": verify_indicator_domination,
    "endpoint_half": verify_endpoint_half,
    "prop_apr": verify_prop,
    "prop_strong": lambda task, grid, seed, threads: verify_prop(task, grid, seed, threads, strong=True),
    "necessity": verify_necessity,
}

RUNNERS = {
    "norm": run_norm,
    "maximal": run_maximal,
    "constant": run_constant,
    "verify": run_verify,
    "counterexample": run_counterexample,
    "sweep": run_sweep,
}


def run(manifest_path, seed_override: int | None = None, threads: int | None = None, log=None) -> int:
    log = log or sys.stderr
    try:
        manifest, tasks = load_manifest(manifest_path)
        if seed_override is not None:
            for t in tasks:
                if "seed" in t.data or t.data.get("kind") == "verify":
                    t.data["seed"] = seed_override
        validate(manifest, tasks)
    except (ManifestError, OSError) as exc:
        print(f"{manifest_path}: {exc}", file=log)
        return 1
    ctx = {"threads": threads or hz.default_threads()}
    all_passed = True
    for task in tasks:
        Path(task.require("output")).parent.mkdir(parents=True, exist_ok=True)
        grid = _grid_for(task, manifest) if task.get("kind") in ("norm", "maximal", "constant", "verify") else None
        try:
            ok = RUNNERS[task.require("kind")](task, grid, ctx)
        except (ValueError, OSError) as exc:
            print(f"{manifest_path}: task {task.index}: {exc}", file=log)
            return 1
        if not ok:
            print(f"task {task.index} ({task.get('check')}): check failed, see {task.get('output')}", file=log)
        all_passed &= ok
    return 0 if all_passed else 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for failed checks
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def main(argv=None) -> int:
    parser = _Parser(prog="mfold", description="Weighted maximal-operator toolkit.")
    parser.add_argument("--list-checks", action="store_true", help="list verification checks and exit")
    sub = parser.add_subparsers(dest="command")
    run_p = sub.add_parser("run", help="execute a JSON run manifest")
    run_p.add_argument("manifest", type=Path)
    run_p.add_argument("--seed-override", type=int, default=None)
    run_p.add_argument("--threads", type=int, default=None, help="worker threads (default $MFOLD_THREADS or 1)")
    args = parser.parse_args(argv)
    if args.list_checks:
        for name, text in hz.CHECKS.items():
            print(f"{name:22s} {text}")
        return 0
    if args.command != "run":
        parser.print_usage(sys.stderr)
        return 1
    return run(args.manifest, args.seed_override, args.threads)


if __name__ == "__main__":
    sys.exit(main())
