#!/usr/bin/env python3
"""Certify every monotonicity rule set and print the verdict counts.

The pessimistic fixture is supposed to show failures; everything else
should come back clean.  Full verdict rows land in OUT/certification.csv.
"""

import argparse
import os

from banditlab import lab
from banditlab.harness import certify_to_file

OUT = "out/certification"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=OUT)
    ap.add_argument("--sweeps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "certification.csv")
    counts = certify_to_file(list(lab.RULE_SETS), path, sweeps=args.sweeps, master_seed=args.seed)
    for name, c in counts.items():
        note = " (expected: this fixture should fail)" if lab.RULE_SETS[name].should_reject else ""
        print(f"{name:28s} passed={c['passed']} failed={c['failed']} inconclusive={c['inconclusive']}{note}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
