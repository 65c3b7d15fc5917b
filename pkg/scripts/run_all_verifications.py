#!/usr/bin/env python3
"""Run every claim verification with its built-in defaults.

Each claim prints its report lines through the normal CLI path; reports
are also collected as JSONL files when --out-dir is given.  Exit status
is 0 only if every claim comes back PASS or VACUOUS.
"""

import argparse
import os
import sys
import time

from polarscale.harness.cli import CLAIMS, main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", help="directory for per-claim JSONL reports")
    parser.add_argument("--trials", type=int, help="override Monte Carlo trial count")
    parser.add_argument("--seed", type=int, help="override Monte Carlo seed")
    args = parser.parse_args()

    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)

    failures = []
    for claim in CLAIMS:
        argv = ["verify", claim]
        if args.trials is not None:
            argv += ["--trials", str(args.trials)]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        if args.out_dir:
            argv += ["--out", os.path.join(args.out_dir, f"{claim}.jsonl")]
        started = time.perf_counter()
        code = cli_main(argv)
        print(f"# {claim}: exit {code} in {time.perf_counter() - started:.1f}s")
        if code != 0:
            failures.append(claim)

    if failures:
        print(f"# failing claims: {', '.join(failures)}")
        return 1
    print("# all claims acceptable")
    return 0


if __name__ == "__main__":
    sys.exit(main())
