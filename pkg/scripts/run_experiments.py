"""Reproduce the counterexample values and both cascade experiments.

    python scripts/run_experiments.py --out runs --rollouts 100000

Writes one directory per experiment (report, policy, CSV statistics for the
continuous cascade and for the discrete chain) plus a budget sweep.
"""

import argparse
import sys
import time
from pathlib import Path

from alarmflag import cli


def step(label, argv):
    t0 = time.perf_counter()
    code = cli.main(argv)
    print(f"-- {label}: exit {code} ({time.perf_counter() - t0:.1f} s)\n")
    return code


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", type=Path, default=Path("runs"))
    ap.add_argument("--rollouts", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--path", choices=("full", "reduced"), default="full")
    args = ap.parse_args()

    codes = [step("appendix", ["appendix", "--out", str(args.out / "appendix")])]
    for name in ("paper-exp1", "paper-exp2"):
        out = args.out / name
        common = ["--preset", name, "--seed", str(args.seed), "--path", args.path]
        codes.append(step(f"{name} solve", ["evaluate", *common, "--out", str(out)]))
        for mode in ("continuous", "chain"):
            codes.append(step(f"{name} {mode} rollouts",
                              ["simulate", *common, "--out", str(out / mode),
                               "--policy", str(out / "policy.json"),
                               "--rollouts", str(args.rollouts), "--mode", mode]))
    codes.append(step("budget sweep", ["sweep", "--preset", "paper-exp1", "--path", args.path,
                                       "--out", str(args.out / "sweep")]))
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
