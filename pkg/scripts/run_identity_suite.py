#!/usr/bin/env python3
"""Randomized residual suite over the exact-identity verifiers.

Draws random rational models and checks the closed-form identities
(Green/resolvent/Krein/spectral-shift/continuation families) against
independent evaluation routes.  Prints the per-family worst residual and a
reproducible digest of the whole report.
"""
import argparse
import json
import sys

from fmlab.scancli import run_verify_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--tol", type=float, default=1e-8)
    ap.add_argument("--out", default=None, help="write the JSON report here")
    args = ap.parse_args()

    report = run_verify_suite(seed=args.seed, count=args.count, tol=args.tol)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
