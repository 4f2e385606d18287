"""Command line entry point.

Subcommands:
  run           run a scenario described by a JSON config file
  run-builtin   run one of the shipped scenarios by name
  list-builtins print the names of the shipped scenarios
  summarize     rebuild the summary JSON from an existing raw CSV
  certify       replay-test monotonicity rule sets and write verdicts

Exit codes: 0 on success, 2 on a validation problem (bad flags, bad
config, malformed input files), 3 on an I/O failure.  Behaviour is
controlled only by flags; no environment variables are consulted.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import lab
from .errors import BanditLabError
from .harness import certify_to_file, run_scenario, summarize_file, summary_text
from .scenarios import builtin, builtin_names, load_config


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--reps", type=int, default=None, help="override the replication count")
    sub.add_argument("--seed", type=int, default=None, help="override the master seed")
    sub.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    sub.add_argument("--out", required=True, help="output directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="banditlab", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="run a scenario from a JSON config")
    run.add_argument("--config", required=True, help="path to the scenario config")
    _add_run_flags(run)
    run.set_defaults(func=_cmd_run)

    runb = subs.add_parser("run-builtin", help="run a shipped scenario by name")
    runb.add_argument("name", help="builtin scenario name (see list-builtins)")
    _add_run_flags(runb)
    runb.set_defaults(func=_cmd_run_builtin)

    lst = subs.add_parser("list-builtins", help="print shipped scenario names")
    lst.set_defaults(func=_cmd_list_builtins)

    summ = subs.add_parser("summarize", help="summary JSON for an existing raw CSV")
    summ.add_argument("raw", help="path to a raw CSV written by run")
    summ.set_defaults(func=_cmd_summarize)

    cert = subs.add_parser("certify", help="replay-test monotonicity rule sets")
    cert.add_argument(
        "--rule-set",
        required=True,
        help="rule set name, or 'all' (see the certification module for the catalog)",
    )
    cert.add_argument("--sweeps", type=int, default=200, help="perturbation sweeps per rule set")
    cert.add_argument("--seed", type=int, default=0, help="master seed for sweep generation")
    cert.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    cert.add_argument("--out", required=True, help="output directory")
    cert.set_defaults(func=_cmd_certify)

    return parser


def _overridden(config, args):
    changes = {}
    if args.reps is not None:
        changes["reps"] = args.reps
    if args.seed is not None:
        changes["master_seed"] = args.seed
    return dataclasses.replace(config, **changes) if changes else config


def _run_and_report(config, args) -> int:
    result = run_scenario(config, args.out, threads=args.threads)
    print(f"wrote {result.raw_path}")
    print(f"wrote {result.summary_path}")
    return 0


def _cmd_run(args) -> int:
    return _run_and_report(_overridden(load_config(args.config), args), args)


def _cmd_run_builtin(args) -> int:
    return _run_and_report(_overridden(builtin(args.name), args), args)


def _cmd_list_builtins(args) -> int:
    for name in builtin_names():
        print(name)
    return 0


def _cmd_summarize(args) -> int:
    sys.stdout.write(summary_text(summarize_file(args.raw)))
    return 0


def _cmd_certify(args) -> int:
    if args.rule_set == "all":
        names = list(lab.RULE_SETS)
    else:
        lab.rule_set(args.rule_set)  # validates the name early
        names = [args.rule_set]
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "certification.csv")
    counts = certify_to_file(
        names, out_path, sweeps=args.sweeps, master_seed=args.seed, threads=args.threads
    )
    for name in names:
        c = counts[name]
        print(f"{name}: {c['passed']} passed, {c['failed']} failed, {c['inconclusive']} inconclusive")
    print(f"wrote {out_path}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BanditLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
