"""Tabulate the weak Holder constant C(p, delta) and its growth as delta -> 1."""

import argparse
import math

from mfold.harness import weak_holder_constant


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+", default=[0.5, 1.0, 2.0, 4.0])
    ap.add_argument("--delta", type=float, nargs="+", default=[0.3, 0.5, 0.9, 0.99, 0.999, 0.9999])
    args = ap.parse_args()

    print(f"{'p':>5} {'delta':>8} {'C':>12} {'(1-d) C':>10} {'(1-d)^.5 C':>11}")
    for p in args.p:
        for d in args.delta:
            c = weak_holder_constant(p, d)
            print(f"{p:5g} {d:8g} {c:12.5f} {(1 - d) * c:10.5f} {math.sqrt(1 - d) * c:11.5f}")


if __name__ == "__main__":
    main()
