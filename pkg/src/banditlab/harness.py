"""Run scenarios to disk: raw replication rows plus a summary document.

External formats, fixed by contract:

- Raw CSV.  Header line is exactly ``RAW_HEADER``.  Every replication
  contributes one row per arm with ``is_chosen=0``; uncensored
  replications add one more row repeating the chosen arm's statistics
  with ``is_chosen=1``.  Floats carry 17 significant digits so reading
  them back is lossless; an empty string marks an undefined value (the
  sample mean of an arm that was never pulled).  Replication seeds
  depend only on (master_seed, rep), so the bytes are identical no
  matter how many worker processes computed them.

- Summary JSON.  A pure function of the raw rows: ``summarize`` on a
  raw file rebuilds the run summary byte for byte.  It aggregates the
  bias report, the per-arm martingale residuals, and the covariance
  identity checks.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from . import lab
from .engine import run_strategy
from .errors import DomainError, NoDataError, SchemaError
from .estimators import (
    BiasReport,
    RepRecord,
    aggregate_report,
    record_from_trace,
    wald_residual,
)
from .rng import SeedStream, derive_rep_seed
from .scenarios import ScenarioConfig
from .table import CounterfactualTable

__all__ = [
    "RAW_HEADER",
    "RunResult",
    "compute_records",
    "run_scenario",
    "build_summary",
    "summarize_file",
    "write_raw",
    "parse_raw",
    "certify_to_file",
]

RAW_HEADER = "scenario,rep,arm,is_chosen,N,stop_time,mean_hat,mu_true,diff,censored"

_CERT_HEADER = [
    "rule_set",
    "sweep",
    "table_seed",
    "row",
    "arm",
    "clause",
    "expected",
    "direction",
    "passed",
    "inconclusive",
    "witness",
    "probe_pairs",
    "probe_all_hold",
    "probe_witness",
]


def _fmt(x: float | None) -> str:
    return "" if x is None else format(x, ".17g")


def _record_rows(name: str, rep: int, mus: tuple[float, ...], rec: RepRecord) -> list[str]:
    rows = []
    cen = "1" if rec.censored else "0"
    for k in range(1, len(mus) + 1):
        j = k - 1
        mean = rec.means[j]
        diff = None if mean is None else mean - mus[j]
        rows.append(
            f"{name},{rep},{k},0,{rec.counts[j]},{rec.stop_time},"
            f"{_fmt(mean)},{_fmt(mus[j])},{_fmt(diff)},{cen}"
        )
    if rec.chosen is not None:
        j = rec.chosen - 1
        mean = rec.means[j]
        rows.append(
            f"{name},{rep},{rec.chosen},1,{rec.counts[j]},{rec.stop_time},"
            f"{_fmt(mean)},{_fmt(mus[j])},{_fmt(mean - mus[j])},{cen}"
        )
    return rows


def write_raw(path: str, name: str, mus: tuple[float, ...], records: list[RepRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(RAW_HEADER + "\n")
        for rep, rec in enumerate(records):
            for row in _record_rows(name, rep, mus, rec):
                fh.write(row + "\n")


# ---------------------------------------------------------------------------
# parsing raw files back

def _p_int(where: str, col: str, tok: str, minimum: int = 0) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise SchemaError(where, f"column {col!r}: expected an integer, got {tok!r}") from None
    if v < minimum:
        raise SchemaError(where, f"column {col!r}: must be >= {minimum}, got {v}")
    return v


def _p_float(where: str, col: str, tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise SchemaError(where, f"column {col!r}: expected a number, got {tok!r}") from None


def _p_flag(where: str, col: str, tok: str) -> bool:
    if tok not in ("0", "1"):
        raise SchemaError(where, f"column {col!r}: expected 0 or 1, got {tok!r}")
    return tok == "1"


class _RepBuild:
    __slots__ = ("arms", "stop_time", "censored", "chosen", "chosen_stats")

    def __init__(self):
        self.arms: dict[int, tuple[int, float | None]] = {}
        self.stop_time: int | None = None
        self.censored: bool | None = None
        self.chosen: int | None = None
        self.chosen_stats: tuple[int, float | None] | None = None


def parse_raw(path: str) -> tuple[str, tuple[float, ...], list[RepRecord]]:
    """Read a raw CSV back into replication records.

    Strict by design: any malformed or inconsistent row raises a
    SchemaError naming ``path:line``; a file with no data rows raises
    NoDataError.
    """
    name: str | None = None
    mus: dict[int, float] = {}
    reps: dict[int, _RepBuild] = {}

    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            where = f"{path}:{lineno}"
            if lineno == 1:
                if line != RAW_HEADER:
                    raise SchemaError(where, f"bad header; expected {RAW_HEADER!r}")
                continue
            if line == "":
                continue
            fields = line.split(",")
            if len(fields) != 10:
                raise SchemaError(where, f"expected 10 fields, got {len(fields)}")
            scen, rep_s, arm_s, chf_s, n_s, stop_s, mean_s, mu_s, diff_s, cen_s = fields
            if name is None:
                if not scen:
                    raise SchemaError(where, "column 'scenario': must be non-empty")
                name = scen
            elif scen != name:
                raise SchemaError(where, f"column 'scenario': {scen!r} does not match {name!r}")
            rep = _p_int(where, "rep", rep_s)
            arm = _p_int(where, "arm", arm_s, minimum=1)
            is_chosen = _p_flag(where, "is_chosen", chf_s)
            n = _p_int(where, "N", n_s)
            stop = _p_int(where, "stop_time", stop_s, minimum=1)
            censored = _p_flag(where, "censored", cen_s)
            if mean_s == "":
                if n != 0 or diff_s != "":
                    raise SchemaError(where, "empty mean_hat is only valid with N=0 and empty diff")
                mean: float | None = None
            else:
                if n == 0:
                    raise SchemaError(where, "mean_hat must be empty when N=0")
                mean = _p_float(where, "mean_hat", mean_s)
            mu = _p_float(where, "mu_true", mu_s)
            if mean is not None and _p_float(where, "diff", diff_s) != mean - mu:
                raise SchemaError(where, "diff does not equal mean_hat - mu_true")
            if arm in mus:
                if mus[arm] != mu:
                    raise SchemaError(where, f"column 'mu_true': arm {arm} already has {mus[arm]!r}")
            else:
                mus[arm] = mu

            build = reps.setdefault(rep, _RepBuild())
            if build.stop_time is None:
                build.stop_time, build.censored = stop, censored
            elif (build.stop_time, build.censored) != (stop, censored):
                raise SchemaError(where, f"rep {rep}: stop_time/censored disagree with earlier rows")
            if is_chosen:
                if censored:
                    raise SchemaError(where, "a censored rep cannot have a chosen row")
                if build.chosen is not None:
                    raise SchemaError(where, f"rep {rep}: duplicate chosen row")
                build.chosen, build.chosen_stats = arm, (n, mean)
            else:
                if arm in build.arms:
                    raise SchemaError(where, f"rep {rep}: duplicate row for arm {arm}")
                build.arms[arm] = (n, mean)

    if not reps:
        raise NoDataError(f"{path}: no data rows")
    n_arms = max(mus)
    if set(mus) != set(range(1, n_arms + 1)):
        raise SchemaError(path, f"arm indices must cover 1..{n_arms}")

    records = []
    for rep, build in reps.items():
        for k in range(1, n_arms + 1):
            if k not in build.arms:
                raise SchemaError(path, f"rep {rep}: missing row for arm {k}")
        if build.censored:
            if build.chosen is not None:
                raise SchemaError(path, f"rep {rep}: censored but has a chosen row")
        else:
            if build.chosen is None:
                raise SchemaError(path, f"rep {rep}: missing chosen row")
            if build.arms[build.chosen] != build.chosen_stats:
                raise SchemaError(path, f"rep {rep}: chosen row disagrees with arm {build.chosen}")
        records.append(
            RepRecord(
                stop_time=build.stop_time,
                censored=build.censored,
                counts=tuple(build.arms[k][0] for k in range(1, n_arms + 1)),
                means=tuple(build.arms[k][1] for k in range(1, n_arms + 1)),
                chosen=build.chosen,
            )
        )
    return name, tuple(mus[k] for k in range(1, n_arms + 1)), records


# ---------------------------------------------------------------------------
# summaries

def _summary_pair(
    name: str, mus: tuple[float, ...], records: list[RepRecord]
) -> tuple[dict, BiasReport]:
    report = aggregate_report(mus, records)
    wald = [asdict(wald_residual(records, k, mus[k - 1])) for k in range(1, len(mus) + 1)]
    return {"scenario": name, "report": report.to_jsonable(), "wald": wald}, report


def build_summary(name: str, mus: tuple[float, ...], records: list[RepRecord]) -> dict:
    return _summary_pair(name, mus, records)[0]


def summarize_file(path: str) -> dict:
    """Summary document for an existing raw CSV; bit-identical to the one
    written next to it by ``run_scenario``."""
    name, mus, records = parse_raw(path)
    return build_summary(name, mus, records)


def summary_text(summary: dict) -> str:
    return json.dumps(summary, indent=2) + "\n"


# ---------------------------------------------------------------------------
# running

def _rep_chunk(config: ScenarioConfig, start: int, stop: int) -> list[RepRecord]:
    out = []
    for r in range(start, stop):
        seed = derive_rep_seed(config.master_seed, r)
        table = CounterfactualTable(seed, config.arms)
        trace = run_strategy(config.strategy, table, SeedStream(seed), cap=config.cap, record=False)
        out.append(record_from_trace(trace))
    return out


def _rep_chunk_star(args) -> list[RepRecord]:
    return _rep_chunk(*args)


def compute_records(config: ScenarioConfig, threads: int = 1) -> list[RepRecord]:
    """All replication records, in replication order.

    The result is a pure function of the config; ``threads`` only changes
    how the work is scheduled.
    """
    if threads < 1:
        raise DomainError(f"threads must be >= 1, got {threads}")
    if threads == 1:
        return _rep_chunk(config, 0, config.reps)
    n_chunks = min(config.reps, threads * 4)
    bounds = [
        (config, (config.reps * i) // n_chunks, (config.reps * (i + 1)) // n_chunks)
        for i in range(n_chunks)
    ]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        parts = list(ex.map(_rep_chunk_star, bounds))
    return [rec for part in parts for rec in part]


@dataclass(frozen=True)
class RunResult:
    config: ScenarioConfig
    records: list[RepRecord]
    report: BiasReport
    summary: dict
    raw_path: str
    summary_path: str


def run_scenario(config: ScenarioConfig, out_dir: str, threads: int = 1) -> RunResult:
    """Run every replication and write ``<name>-raw.csv`` plus
    ``<name>-summary.json`` under ``out_dir``."""
    records = compute_records(config, threads)
    mus = tuple(a.mu for a in config.arms)
    summary, report = _summary_pair(config.name, mus, records)

    os.makedirs(out_dir, exist_ok=True)
    raw_path = os.path.join(out_dir, f"{config.name}-raw.csv")
    summary_path = os.path.join(out_dir, f"{config.name}-summary.json")
    write_raw(raw_path, config.name, mus, records)
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(summary_text(summary))
    return RunResult(
        config=config,
        records=records,
        report=report,
        summary=summary,
        raw_path=raw_path,
        summary_path=summary_path,
    )


# ---------------------------------------------------------------------------
# certification runs

def certify_to_file(
    names: list[str],
    out_path: str,
    sweeps: int = 200,
    master_seed: int = 0,
    threads: int = 1,
) -> dict[str, dict[str, int]]:
    """Certify the named monotonicity rule sets and write one verdict CSV.

    Returns ``{rule_set: {"passed": ..., "failed": ..., "inconclusive": ...}}``.
    """
    counts: dict[str, dict[str, int]] = {}
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CERT_HEADER)
        for name in names:
            outcomes = lab.certify_rule_set(
                name, sweeps=sweeps, master_seed=master_seed, threads=threads
            )
            counts[name] = lab.outcome_counts(outcomes)
            for o in outcomes:
                probe = o.probe
                writer.writerow(
                    [
                        o.rule_set,
                        o.index,
                        o.table_seed,
                        o.row,
                        o.arm,
                        o.clause,
                        o.expected,
                        "" if o.direction is None else o.direction,
                        int(o.passed),
                        int(o.inconclusive),
                        o.witness or "",
                        "" if probe is None else probe.pairs_checked,
                        "" if probe is None else int(probe.all_hold),
                        "" if probe is None else (probe.witness or ""),
                    ]
                )
    return counts
