#!/usr/bin/env python3
"""Run the full acceptance battery and print the report table.

Equivalent to ``hgdilute suite``; use ``--quick`` for a smoke-sized run.
"""

import argparse
import sys
import time

from hgdilute.acceptance import run_suite


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--seed", type=int, default=20250810)
    parser.add_argument("--only", help="comma-separated criterion numbers")
    args = parser.parse_args()
    only = {int(x) for x in args.only.split(",")} if args.only else None

    start = time.time()
    results = run_suite(only=only, quick=args.quick, seed=args.seed)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.ident:>2}  {r.name:<{width}}  {status}  {r.detail}")
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} criteria passed "
          f"in {time.time() - start:.1f}s")
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
