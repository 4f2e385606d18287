#!/usr/bin/env python3
"""Run every builtin scenario and print one headline line per run.

Writes <name>-raw.csv and <name>-summary.json for each scenario under
OUT.  At the default replication count the whole catalog takes a few
minutes; pass --reps to iterate faster.
"""

import argparse
import dataclasses

from banditlab.harness import run_scenario
from banditlab.scenarios import builtin_scenarios

OUT = "out/builtins"


def headline(report) -> str:
    arms = " ".join(f"arm{a.arm}={a.bias:+.4f}" for a in report.per_arm if a.bias is not None)
    chosen = "" if report.chosen.bias is None else f" chosen={report.chosen.bias:+.4f}"
    cens = f" censored={report.censored_reps}" if report.censored_reps else ""
    return f"bias: {arms}{chosen}{cens}"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=OUT)
    ap.add_argument("--reps", type=int, default=None, help="override every scenario's count")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    for cfg in builtin_scenarios():
        if args.reps is not None:
            cfg = dataclasses.replace(cfg, reps=args.reps)
        result = run_scenario(cfg, args.out, threads=args.threads)
        print(f"{cfg.name:24s} {headline(result.report)}")


if __name__ == "__main__":
    main()
