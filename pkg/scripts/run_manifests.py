"""Run every manifest in manifests/ and report exit codes and timings."""

import argparse
import sys
import time
from pathlib import Path

from mfold.cli import run

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("manifests", nargs="*", type=Path, default=sorted((ROOT / "manifests").glob("*.json")))
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    worst = 0
    for m in args.manifests:
        t0 = time.perf_counter()
        code = run(m, threads=args.threads)
        print(f"{m.name:28s} exit {code}  {time.perf_counter() - t0:6.1f}s")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
