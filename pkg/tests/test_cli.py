import csv
import json

import pytest

from mfold import cli
from mfold.harness import SweepRow

ONE = {"tag": "Constant", "c": 1.0}


def write_manifest(path, tasks, grid=None):
    data = {"version": 1, "grid": grid or {"n": 1, "R": 4, "N": 16}, "tasks": tasks}
    path.write_text(json.dumps(data, indent=2))
    return path


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_constant_task(tmp_path):
    out = tmp_path / "ap.csv"
    m = write_manifest(tmp_path / "m.json", [{"kind": "constant", "constant": "ap", "w": ONE, "p": 2, "output": str(out)}])
    assert cli.main(["run", str(m)]) == 0
    (row,) = rows(out)
    assert float(row["value"]) == 1.0 and row["constant_name"] == "ap"


def test_counterexample_task(tmp_path):
    out = tmp_path / "deep" / "er" / "cx.csv"
    task = {"kind": "counterexample", "p1": 2, "p2": 2, "h": 0.01, "R": [25, 50, 100], "output": str(out)}
    assert cli.main(["run", str(write_manifest(tmp_path / "m.json", [task]))]) == 0
    got = rows(out)
    assert len(got) == 3
    assert [round(float(r["lhs"]), 2) for r in got] == [6.44, 7.82, 9.21]


def test_kolmogorov_validation_writes_nothing(tmp_path, capsys):
    tasks = [
        {"kind": "constant", "constant": "ap", "w": ONE, "p": 2, "output": str(tmp_path / "o" / "a.csv")},
        {"kind": "verify", "check": "kolmogorov", "seed": 1, "pq": [[1, 1]], "output": str(tmp_path / "o" / "k.csv")},
    ]
    m = write_manifest(tmp_path / "m.json", tasks)
    assert cli.main(["run", str(m)]) == 1
    assert not (tmp_path / "o").exists()
    err = capsys.readouterr().err
    assert "0 < q < p" in err
    # the message points at the line of the offending task
    line = next(i for i, t in enumerate(m.read_text().splitlines(), 1) if '"kolmogorov"' in t)
    kind_line = max(i for i, t in enumerate(m.read_text().splitlines()[:line], 1) if '"kind"' in t)
    assert f"line {kind_line}:" in err


def test_bad_json_line(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text('{\n  "tasks": [\n    {"kind": "norm",}\n  ]\n}\n')
    assert cli.main(["run", str(m)]) == 1
    assert "line 3:" in capsys.readouterr().err


@pytest.mark.parametrize(
    "task",
    [
        {"kind": "plot", "output": "x.csv"},
        {"kind": "verify", "check": "char_holder", "output": "x.csv"},
        {"kind": "verify", "check": "nope", "seed": 1, "output": "x.csv"},
        {"kind": "constant", "constant": "ap", "w": {"tag": "Indicator", "lo": 0, "hi": 1}, "p": 2, "output": "x.csv"},
        {"kind": "constant", "constant": "ap", "w": ONE, "p": 0.5, "output": "x.csv"},
        {"kind": "norm", "function": ONE, "weight": ONE, "p": 2},
        {"kind": "sweep", "quantity": "apr", "weight": ONE, "p": 2, "R": [], "output": "x.csv"},
    ],
)
def test_invalid_tasks(tmp_path, task):
    assert cli.main(["run", str(write_manifest(tmp_path / "m.json", [task]))]) == 1


def test_failed_check_exits_2_with_witness(tmp_path):
    out = tmp_path / "e.csv"
    task = {"kind": "verify", "check": "endpoint_half", "R": [4, 8], "h": 0.5, "tolerance": 1e-6, "seed": 5, "output": str(out)}
    assert cli.main(["run", str(write_manifest(tmp_path / "m.json", [task]))]) == 2
    summary = json.loads((tmp_path / "e.summary.json").read_text())
    assert summary["pass"] is False and summary["witness_seed"] == 5


def test_usage_errors_exit_1(capsys):
    assert cli.main([]) == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["run"])
    assert exc.value.code == 1
    assert cli.main(["--list-checks"]) == 0
    assert "kolmogorov" in capsys.readouterr().out


def test_emit_plotdata(tmp_path):
    path = tmp_path / "p.csv"
    cli.emit_plotdata([SweepRow(1, 3.0, 7.0), (2, 1.0, 3.0), (4, 0.1, 0.3)], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 4 and lines[0] == "x,lhs,rhs,ratio"
    assert lines[1] == "1,3,7,0.428571428571429"
    for r in rows(path):
        # the ratio is formatted from lhs / rhs before rounding, so only the 15-digit rounding separates them
        assert abs(float(r["ratio"]) - float(r["lhs"]) / float(r["rhs"])) <= 5e-15 * float(r["ratio"])
    with pytest.raises(ValueError):
        cli.emit_plotdata([], tmp_path / "empty.csv")
    assert not (tmp_path / "empty.csv").exists()


def _mixed_manifest(tmp_path, sub):
    d = tmp_path / sub
    tasks = [
        {"kind": "verify", "check": "weak_holder", "instances": 10, "seed": 3, "output": str(d / "wh.csv")},
        {"kind": "verify", "check": "weight_identities", "instances": 10, "seed": 4, "output": str(d / "wi.csv")},
        {"kind": "norm", "function": {"tag": "RandomSteps", "seed": 2}, "weight": {"tag": "Power", "a": 0.3}, "p": 1.5,
         "output": str(d / "norm.csv")},
        {"kind": "maximal", "function": {"tag": "RandomSteps", "seed": 2}, "output": str(d / "max.csv")},
        {"kind": "sweep", "quantity": "apr", "weight": {"tag": "CounterexampleW2", "p1": 2, "p2": 2}, "p": 2,
         "h": 1.0, "R": [4, 8], "output": str(d / "apr.csv")},
    ]
    return write_manifest(tmp_path / f"{sub}.json", tasks), d


def test_reruns_are_byte_identical(tmp_path):
    m1, d1 = _mixed_manifest(tmp_path, "a")
    m2, d2 = _mixed_manifest(tmp_path, "b")
    assert cli.main(["run", str(m1), "--threads", "1"]) == 0
    assert cli.main(["run", str(m2), "--threads", "4"]) == 0
    names = sorted(p.name for p in d1.iterdir())
    assert names == sorted(p.name for p in d2.iterdir()) and len(names) == 7
    for name in names:
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_seed_override(tmp_path, monkeypatch):
    monkeypatch.setenv("MFOLD_THREADS", "2")
    m, d = _mixed_manifest(tmp_path, "a")
    assert cli.main(["run", str(m)]) == 0
    first = (d / "wh.csv").read_bytes()
    assert cli.main(["run", str(m), "--seed-override", "99"]) == 0
    assert (d / "wh.csv").read_bytes() != first
