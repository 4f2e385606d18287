"""Reader for the simulation harness's raw CSV files.

The contract (header below, floats with 17 significant digits, one row
per replication and arm with ``is_chosen=0`` plus one chosen row per
uncensored replication with ``is_chosen=1``) is consumed as-is; nothing
is ever recomputed from the simulation side.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DataError, SchemaError

RAW_COLUMNS = (
    "scenario",
    "rep",
    "arm",
    "is_chosen",
    "N",
    "stop_time",
    "mean_hat",
    "mu_true",
    "diff",
    "censored",
)


@dataclass(frozen=True)
class Row:
    arm: int
    is_chosen: bool
    censored: bool
    diff: float | None  # None when the arm was never pulled


@dataclass(frozen=True)
class RawFile:
    path: str
    scenario: str
    rows: tuple[Row, ...]


def _check_header(path: str, line: str) -> None:
    got = line.split(",")
    missing = [c for c in RAW_COLUMNS if c not in got]
    if missing:
        raise SchemaError(f"{path}:1: missing column(s): {', '.join(missing)}")
    if tuple(got) != RAW_COLUMNS:
        raise SchemaError(f"{path}:1: header does not match the raw CSV contract")


def _flag(where: str, col: str, tok: str) -> bool:
    if tok not in ("0", "1"):
        raise SchemaError(f"{where}: column {col!r}: expected 0 or 1, got {tok!r}")
    return tok == "1"


def read_raw(path: str) -> RawFile:
    """Parse one raw CSV; malformed content raises SchemaError with
    ``path:line``, a file without data rows raises DataError."""
    scenario: str | None = None
    rows: list[Row] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            where = f"{path}:{lineno}"
            if lineno == 1:
                _check_header(path, line)
                continue
            if line == "":
                continue
            fields = line.split(",")
            if len(fields) != len(RAW_COLUMNS):
                raise SchemaError(f"{where}: expected {len(RAW_COLUMNS)} fields, got {len(fields)}")
            scen, _rep, arm_s, chosen_s, _n, _stop, mean_s, _mu, diff_s, cen_s = fields
            if scenario is None:
                scenario = scen
            elif scen != scenario:
                raise SchemaError(f"{where}: scenario {scen!r} does not match {scenario!r}")
            try:
                arm = int(arm_s)
            except ValueError:
                raise SchemaError(f"{where}: column 'arm': expected an integer, got {arm_s!r}") from None
            if arm < 1:
                raise SchemaError(f"{where}: column 'arm': must be >= 1, got {arm}")
            if (mean_s == "") != (diff_s == ""):
                raise SchemaError(f"{where}: mean_hat and diff must be empty together")
            if diff_s == "":
                diff: float | None = None
            else:
                try:
                    diff = float(diff_s)
                except ValueError:
                    raise SchemaError(f"{where}: column 'diff': expected a number, got {diff_s!r}") from None
            rows.append(
                Row(
                    arm=arm,
                    is_chosen=_flag(where, "is_chosen", chosen_s),
                    censored=_flag(where, "censored", cen_s),
                    diff=diff,
                )
            )
    if not rows:
        raise DataError(f"{path}: no data rows")
    return RawFile(path=path, scenario=scenario, rows=tuple(rows))


def group_diffs(files: list[RawFile], group: str) -> dict[str, list[float]]:
    """Group the ``diff`` values for plotting.

    ``arm``: per-arm rows (is_chosen=0) of uncensored replications, one
    group per arm.  ``chosen``: the chosen rows (is_chosen=1), one group.
    ``scenario``: per-arm rows of uncensored replications pooled per
    input file.  Groups appear in first-seen order; each must end up
    non-empty.
    """
    if group not in ("arm", "chosen", "scenario"):
        raise SchemaError(f"unknown group {group!r}; expected arm, chosen or scenario")
    groups: dict[str, list[float]] = {}
    for rf in files:
        if group == "arm":
            arms = sorted({row.arm for row in rf.rows})
            for k in arms:
                groups.setdefault(f"arm {k}", [])
        elif group == "chosen":
            groups.setdefault("chosen", [])
        else:
            groups.setdefault(rf.scenario, [])
        for row in rf.rows:
            if row.censored or row.diff is None:
                continue
            if group == "chosen":
                if row.is_chosen:
                    groups["chosen"].append(row.diff)
            elif not row.is_chosen:
                key = f"arm {row.arm}" if group == "arm" else rf.scenario
                groups[key].append(row.diff)
    for label, values in groups.items():
        if not values:
            raise DataError(f"group {label!r} is empty after filtering")
    return groups
