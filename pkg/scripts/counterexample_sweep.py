"""Divergent pair on growing boxes: LHS against 2 ln R, RHS against 2."""

import argparse
import math

from mfold.cli import emit_plotdata
from mfold.harness import counterexample_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--R", type=float, nargs="+", default=[25, 50, 100, 200, 400])
    ap.add_argument("--h", type=float, default=0.01)
    ap.add_argument("--p1", type=float, default=2.0)
    ap.add_argument("--p2", type=float, default=2.0)
    ap.add_argument("--out", help="optional x,lhs,rhs,ratio CSV")
    args = ap.parse_args()

    rows = counterexample_sweep(args.p1, args.p2, args.R, args.h)
    print(f"{'R':>8} {'lhs':>10} {'2 ln R':>10} {'rhs':>10} {'ratio':>8}")
    for r in rows:
        print(f"{r.x:8g} {r.lhs:10.5f} {2 * math.log(r.x):10.5f} {r.rhs:10.5f} {r.ratio:8.4f}")
    if args.out:
        emit_plotdata(rows, args.out)


if __name__ == "__main__":
    main()
