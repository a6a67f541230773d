"""A_p, A_p^R, A_1 and reverse Holder constants of the weight families along an R-sweep."""

import argparse

from mfold.measure import Grid
from mfold.weights import (
    Constant,
    CounterexampleW2,
    PiecewiseRandom,
    Power,
    a1_constant,
    ap_constant,
    apr_constant,
    realize,
    rh_constant,
)

FAMILIES = {
    "constant": Constant(1.0),
    "power+0.5": Power(0.5),
    "power-0.5": Power(-0.5),
    "piecewise": PiecewiseRandom(3, 1.0, 16.0, 1.0),
    "counterexample": CounterexampleW2(2.0, 2.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--R", type=float, nargs="+", default=[8, 16, 32, 64, 128])
    ap.add_argument("--h", type=float, default=0.5)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--s", type=float, default=2.0, help="reverse Holder exponent")
    args = ap.parse_args()

    print(f"{'family':>15} {'R':>6} {'A_p':>10} {'A_p^R':>10} {'A_p^(1/p)':>10} {'A_1':>10} {'RH_s':>8}")
    for name, spec in FAMILIES.items():
        for R in args.R:
            w = realize(spec, Grid.with_spacing(1, R, args.h))
            a = ap_constant(w, args.p).value
            print(
                f"{name:>15} {R:6g} {a:10.4f} {apr_constant(w, args.p).value:10.4f} {a ** (1 / args.p):10.4f}"
                f" {a1_constant(w).value:10.4f} {rh_constant(w, args.s).value:8.4f}"
            )


if __name__ == "__main__":
    main()
