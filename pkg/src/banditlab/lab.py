"""Single-cell perturbation replay and monotone-response certification.

A sweep reruns one strategy on reward tables that differ in exactly one
cell, with the auxiliary seed stream held fixed, and watches how a
response quantity moves as the cell value increases:

  sampling-counts     the perturbed arm's pull count at every fixed time
  stopping-time       the stop time of the run
  choosing-indicator  whether the perturbed arm is the reported arm
  strategy-ratio      indicator(reported) / pull count at the stop time

The verdict classifies the response over the whole grid as
non-decreasing, non-increasing, both (constant), or violated, and a
violation always carries the offending grid pair.  Verdicts are
empirical: they certify the finite grid that was replayed, nothing more.

Grids combine the arm's quantiles at {0.05, 0.25, 0.5, 0.75, 0.95} with
the unperturbed cell value.  Two-point families (Bernoulli) only admit
the two support values.

A registry of rule sets pairs each shipped rule with the clause it is
expected to satisfy; `certify_rule_set` replays R randomized sweeps
(fresh table seed, random cell among the cells the base run actually
read) and reports one outcome per sweep.  Sweeps are independent by
construction, so they parallelize across processes.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .arms import Arm, Bernoulli, Gaussian, two_point_support
from .choosing import ArgmaxCount, ArgmaxLastObservation, ArgmaxMean, FixedArm, RankProbability
from .engine import StrategySpec, Trace, run_strategy
from .errors import ConsistencyError, DomainError
from .rng import SeedStream, keyed_bits, keyed_uniform
from .sampling import EpsGreedy, Greedy, LilUCB, MinMeanGreedy, RoundRobin, ThompsonBetaBernoulli, ThompsonGaussian, UCB
from .stopping import FirstSuccess, FixedHorizon, LilUCBCount, LineCrossing, MeanBoundary
from .table import CounterfactualTable

CLAUSE_SAMPLING = "sampling-counts"
CLAUSE_STOPPING = "stopping-time"
CLAUSE_CHOOSING = "choosing-indicator"
CLAUSE_RATIO = "strategy-ratio"
CLAUSES = (CLAUSE_SAMPLING, CLAUSE_STOPPING, CLAUSE_CHOOSING, CLAUSE_RATIO)

NON_DECREASING = "non-decreasing"
NON_INCREASING = "non-increasing"
BOTH = "both"
VIOLATED = "violated"

GRID_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)

_CERT = 0x63657274  # domain tag for certification seed derivations


def quantile_grid(arm: Arm, base_value: float) -> tuple[float, ...]:
    """Perturbation values for one cell: arm quantiles plus the base value."""
    values = {float(arm.inverse_cdf(q)) for q in GRID_QUANTILES}
    values.add(float(base_value))
    grid = tuple(sorted(values))
    lo, hi = arm.support()
    if grid[0] < lo or grid[-1] > hi:
        raise DomainError(f"grid {grid} leaves the arm support [{lo}, {hi}]")
    floor = 2 if two_point_support(arm) else 3
    if len(grid) < floor:
        raise DomainError(f"perturbation grid {grid} is degenerate")
    return grid


@dataclass(frozen=True)
class PerturbationSweep:
    """One certified experiment: a cell, a value grid, and the replayed strategy."""

    row: int
    arm: int
    grid: tuple[float, ...]
    table_seed: int
    strategy: StrategySpec

    def __post_init__(self):
        if self.row < 1 or self.arm < 1:
            raise DomainError(f"cell ({self.row}, {self.arm}) out of range")
        if len(self.grid) < 2:
            raise DomainError("a sweep needs at least two grid values")
        for a, b in zip(self.grid, self.grid[1:]):
            if not a < b:
                raise DomainError(f"grid {self.grid} is not strictly increasing")


@dataclass(frozen=True)
class ReplayPoint:
    """One replayed grid value and the trace it produced."""

    value: float
    trace: Trace


def replay_with_perturbation(strategy, table, seeds, row: int, arm: int, grid, *, cap: int, record: bool = True) -> tuple[ReplayPoint, ...]:
    """Rerun the strategy once per grid value, overriding cell (row, arm).

    The grid here may repeat values (a degenerate grid replays the base
    table verbatim); certification sweeps use strictly increasing grids.
    """
    if not grid:
        raise DomainError("empty perturbation grid")
    for a, b in zip(grid, grid[1:]):
        if b < a:
            raise DomainError(f"grid {tuple(grid)} must be sorted ascending")
    points = []
    for value in grid:
        forked = table.with_override(row, arm, value)
        points.append(ReplayPoint(float(value), run_strategy(strategy, forked, seeds, cap, record=record)))
    return tuple(points)


def sweep_points(sweep: PerturbationSweep, arms, *, cap: int, record: bool = True) -> tuple[ReplayPoint, ...]:
    """Materialize a sweep's table/seed stream and replay its grid."""
    table = CounterfactualTable(sweep.table_seed, arms)
    seeds = SeedStream(sweep.table_seed)
    return replay_with_perturbation(sweep.strategy, table, seeds, sweep.row, sweep.arm, sweep.grid, cap=cap, record=record)


@dataclass(frozen=True)
class Witness:
    """A grid pair whose replayed quantities moved in a definite direction."""

    lo_value: float
    hi_value: float
    lo_quantity: float
    hi_quantity: float
    at_time: int | None = None

    def describe(self) -> str:
        when = f" at t={self.at_time}" if self.at_time is not None else ""
        return f"value {self.lo_value:g}->{self.hi_value:g}: quantity {self.lo_quantity:g}->{self.hi_quantity:g}{when}"


@dataclass(frozen=True)
class MonotonicityVerdict:
    """How one clause quantity responded over a sweep's grid.

    direction is None when a replay hit the cap, which leaves the clause
    unobservable (the run never finished); such verdicts pass nothing.
    """

    clause: str
    arm: int
    direction: str | None
    increase: Witness | None
    decrease: Witness | None

    @property
    def inconclusive(self) -> bool:
        return self.direction is None

    def passes(self, expected: str) -> bool:
        if expected not in (NON_DECREASING, NON_INCREASING):
            raise DomainError(f"expected direction must be {NON_DECREASING!r} or {NON_INCREASING!r}, got {expected!r}")
        if self.direction is None:
            return False
        return self.direction == BOTH or self.direction == expected

    def rejection_witness(self, expected: str) -> Witness | None:
        """The pair that moves against the expected direction, if any."""
        return self.decrease if expected == NON_DECREASING else self.increase


def _count_series(trace: Trace, k: int, t_max: int) -> tuple[int, ...]:
    if trace.actions is None:
        raise DomainError("the sampling clause needs traces with recorded paths")
    out, n = [], 0
    for a in trace.actions[:t_max]:
        if a == k:
            n += 1
        out.append(n)
    return tuple(out)


def _ratio(trace: Trace, k: int) -> float:
    if trace.chosen != k:
        return 0.0
    n = trace.counts[k - 1]
    if n < 1:
        raise ConsistencyError(f"arm {k} was reported but never pulled")
    return 1.0 / n


def _clause_series(points, clause: str, k: int) -> list[tuple[float, ...]]:
    if clause == CLAUSE_SAMPLING:
        t_max = min(p.trace.stop_time for p in points)
        return [tuple(map(float, _count_series(p.trace, k, t_max))) for p in points]
    if clause == CLAUSE_STOPPING:
        return [(float(p.trace.stop_time),) for p in points]
    if clause == CLAUSE_CHOOSING:
        return [(1.0 if p.trace.chosen == k else 0.0,) for p in points]
    return [(_ratio(p.trace, k),) for p in points]


def monotonicity_verdict(sweep: PerturbationSweep, arms, clause: str, *, cap: int = 10_000, points=None) -> MonotonicityVerdict:
    """Replay a sweep (or reuse its points) and classify one clause quantity.

    Quantities are compared across consecutive grid values; the sampling
    clause compares the perturbed arm's pull count at every time up to
    the shortest replayed run.
    """
    if clause not in CLAUSES:
        raise DomainError(f"unknown clause {clause!r}; expected one of {CLAUSES}")
    if points is None:
        points = sweep_points(sweep, arms, cap=cap, record=clause == CLAUSE_SAMPLING)
    k = sweep.arm
    if any(p.trace.censored for p in points):
        return MonotonicityVerdict(clause, k, None, None, None)
    series = _clause_series(points, clause, k)
    scalar = clause != CLAUSE_SAMPLING
    increase = decrease = None
    for idx in range(len(points) - 1):
        lo, hi = points[idx], points[idx + 1]
        for t, (x, y) in enumerate(zip(series[idx], series[idx + 1]), start=1):
            when = None if scalar else t
            if y > x and increase is None:
                increase = Witness(lo.value, hi.value, x, y, when)
            elif y < x and decrease is None:
                decrease = Witness(lo.value, hi.value, x, y, when)
        if increase is not None and decrease is not None:
            break
    if increase is None and decrease is None:
        direction = BOTH
    elif decrease is None:
        direction = NON_DECREASING
    elif increase is None:
        direction = NON_INCREASING
    else:
        direction = VIOLATED
    return MonotonicityVerdict(clause, k, direction, increase, decrease)


@dataclass(frozen=True)
class LilProbeReport:
    """Pairwise proof-step checks over a sweep, gated on the base run
    reporting the perturbed arm:

      stop_time_le     the run with the larger cell value stops no later
      choice_sticks    the larger value still reports the same arm
      chosen_count_le  when both report it, the larger value used no
                       more pulls of the arm

    Pairs where the lower-valued run reports some other arm constrain
    nothing (the ratio inequality is then trivial) and are skipped.
    """

    stop_time_le: bool
    choice_sticks: bool
    chosen_count_le: bool
    pairs_checked: int
    inconclusive: bool
    witness: str | None

    @property
    def all_hold(self) -> bool:
        return not self.inconclusive and self.stop_time_le and self.choice_sticks and self.chosen_count_le


def lil_ucb_lemma_probe(points, arm: int) -> LilProbeReport:
    """Check the count-crossing proof-step inequalities on every ordered pair."""
    pts = sorted(points, key=lambda p: p.value)
    if any(p.trace.censored for p in pts):
        return LilProbeReport(True, True, True, 0, True, None)
    stop_le = choice = count_le = True
    pairs = 0
    witness = None

    def note(msg: str) -> str | None:
        return witness if witness is not None else msg

    for i, a in enumerate(pts):
        if a.trace.chosen != arm:
            continue
        n_a = a.trace.counts[arm - 1]
        for b in pts[i + 1 :]:
            pairs += 1
            pair = f"value {a.value:g}->{b.value:g}"
            if b.trace.stop_time > a.trace.stop_time:
                stop_le = False
                witness = note(f"stop time rose {a.trace.stop_time}->{b.trace.stop_time} ({pair})")
            if b.trace.chosen != arm:
                choice = False
                witness = note(f"reported arm flipped {arm}->{b.trace.chosen} ({pair})")
            elif b.trace.counts[arm - 1] > n_a:
                count_le = False
                witness = note(f"reported-arm pulls rose {n_a}->{b.trace.counts[arm - 1]} ({pair})")
    return LilProbeReport(stop_le, choice, count_le, pairs, False, witness)


@dataclass(frozen=True)
class RuleSetSpec:
    """A shipped rule plus the clause and direction it is certified against."""

    name: str
    arms: tuple[Arm, ...]
    strategy: StrategySpec
    clause: str
    expected: str
    cap: int
    probes: bool = False
    should_reject: bool = False
    cell_arm: int | None = None


def _sampling_set(name: str, arms: tuple[Arm, ...], rule, horizon: int = 60, **kw) -> RuleSetSpec:
    strategy = StrategySpec(rule, FixedHorizon(horizon), FixedArm(1))
    return RuleSetSpec(name, arms, strategy, CLAUSE_SAMPLING, NON_DECREASING, cap=horizon + 1, **kw)


def _stopping_set(name: str, arms: tuple[Arm, ...], rule) -> RuleSetSpec:
    strategy = StrategySpec(RoundRobin(), rule, FixedArm(1))
    return RuleSetSpec(name, arms, strategy, CLAUSE_STOPPING, NON_INCREASING, cap=10_000)


def _choosing_set(name: str, rule) -> RuleSetSpec:
    arms = (Gaussian(0.4, 1.0), Gaussian(0.0, 1.0), Gaussian(-0.4, 1.0))
    strategy = StrategySpec(RoundRobin(), FixedHorizon(30), rule)
    return RuleSetSpec(name, arms, strategy, CLAUSE_CHOOSING, NON_DECREASING, cap=31)


def _two_gaussians(gap: float) -> tuple[Arm, ...]:
    return (Gaussian(gap, 1.0), Gaussian(0.0, 1.0))


# Probability-vector rules (eps-greedy, Thompson) are certified on two
# arms, where "which other arm" is never in play; deterministic index
# rules (greedy, UCB, lil'UCB) tolerate any arm count.
RULE_SETS: dict[str, RuleSetSpec] = {
    s.name: s
    for s in (
        _sampling_set("sampling-greedy", _two_gaussians(0.3), Greedy()),
        _sampling_set("sampling-ucb", (Gaussian(0.5, 1.0), Gaussian(0.0, 1.0), Gaussian(-0.5, 1.0)), UCB(delta=0.1)),
        _sampling_set("sampling-eps-greedy", _two_gaussians(0.3), EpsGreedy(eps=0.2)),
        _sampling_set("sampling-thompson-gaussian", _two_gaussians(0.5), ThompsonGaussian()),
        _sampling_set("sampling-thompson-beta", (Bernoulli(0.6), Bernoulli(0.4)), ThompsonBetaBernoulli()),
        _sampling_set("pessimistic-fixture", _two_gaussians(0.3), MinMeanGreedy(), should_reject=True),
        _stopping_set("stopping-mean-boundary", _two_gaussians(1.0), MeanBoundary(1, 0.5)),
        _stopping_set("stopping-line-crossing", (Gaussian(1.0, 1.0),), LineCrossing(1, 0.5, 5.0)),
        _stopping_set("stopping-first-success", (Bernoulli(0.5), Bernoulli(0.5)), FirstSuccess(1)),
        _choosing_set("choosing-argmax-mean", ArgmaxMean()),
        _choosing_set("choosing-rank-probability", RankProbability((0.6, 0.3, 0.1))),
        _choosing_set("choosing-argmax-last", ArgmaxLastObservation()),
        RuleSetSpec(
            "lilucb",
            (Gaussian(1.0, 1.0), Gaussian(0.0, 1.0), Gaussian(-1.0, 1.0)),
            StrategySpec(LilUCB(), LilUCBCount(), ArgmaxCount()),
            CLAUSE_RATIO,
            NON_DECREASING,
            cap=100_000,
            probes=True,
        ),
    )
}


@dataclass(frozen=True)
class SweepOutcome:
    """One certified sweep, flattened for tabular output."""

    rule_set: str
    index: int
    table_seed: int
    row: int
    arm: int
    clause: str
    expected: str
    direction: str | None
    passed: bool
    inconclusive: bool
    witness: str | None
    probe: LilProbeReport | None


def _pick_cell(spec: RuleSetSpec, counts, u: float) -> tuple[int, int] | None:
    if spec.cell_arm is not None:
        n = counts[spec.cell_arm - 1]
        return (1 + int(u * n), spec.cell_arm) if n >= 1 else None
    total = sum(counts)
    if total < 1:
        return None
    idx = int(u * total)
    for k, n in enumerate(counts, start=1):
        if idx < n:
            return (idx + 1, k)
        idx -= n
    raise ConsistencyError("cell index outside the visited table")


def make_sweep(spec: RuleSetSpec, master_seed: int, index: int) -> PerturbationSweep | None:
    """Derive sweep index's table seed, run the base strategy, and pick a
    visited cell; None when the base run is censored or saw nothing."""
    salt = zlib.crc32(spec.name.encode("ascii"))
    table_seed = keyed_bits(master_seed, _CERT, salt, index, 0)
    table = CounterfactualTable(table_seed, spec.arms)
    seeds = SeedStream(table_seed)
    base = run_strategy(spec.strategy, table, seeds, spec.cap, record=False)
    if base.censored:
        return None
    cell = _pick_cell(spec, base.counts, keyed_uniform(master_seed, _CERT, salt, index, 1))
    if cell is None:
        return None
    row, arm = cell
    grid = quantile_grid(spec.arms[arm - 1], table.cell(row, arm))
    return PerturbationSweep(row=row, arm=arm, grid=grid, table_seed=table_seed, strategy=spec.strategy)


def run_sweep(spec: RuleSetSpec, sweep: PerturbationSweep, index: int) -> SweepOutcome:
    points = sweep_points(sweep, spec.arms, cap=spec.cap, record=spec.clause == CLAUSE_SAMPLING)
    verdict = monotonicity_verdict(sweep, spec.arms, spec.clause, cap=spec.cap, points=points)
    probe = lil_ucb_lemma_probe(points, sweep.arm) if spec.probes else None
    passed = verdict.passes(spec.expected) and (probe is None or probe.all_hold)
    witness = None
    if not passed and not verdict.inconclusive:
        w = verdict.rejection_witness(spec.expected)
        if w is not None:
            witness = w.describe()
        elif probe is not None:
            witness = probe.witness
    return SweepOutcome(
        rule_set=spec.name,
        index=index,
        table_seed=sweep.table_seed,
        row=sweep.row,
        arm=sweep.arm,
        clause=spec.clause,
        expected=spec.expected,
        direction=verdict.direction,
        passed=passed,
        inconclusive=verdict.inconclusive or (probe is not None and probe.inconclusive),
        witness=witness,
        probe=probe,
    )


def rule_set(name: str) -> RuleSetSpec:
    try:
        return RULE_SETS[name]
    except KeyError:
        known = ", ".join(sorted(RULE_SETS))
        raise DomainError(f"unknown rule set {name!r}; known: {known}") from None


def _outcome(spec: RuleSetSpec, master_seed: int, index: int) -> SweepOutcome:
    sweep = make_sweep(spec, master_seed, index)
    if sweep is None:
        return SweepOutcome(spec.name, index, 0, 0, 0, spec.clause, spec.expected, None, False, True, None, None)
    return run_sweep(spec, sweep, index)


def _certify_worker(args: tuple[str, int, int]) -> SweepOutcome:
    name, master_seed, index = args
    return _outcome(rule_set(name), master_seed, index)


def certify_rule_set(name: str, *, sweeps: int = 200, master_seed: int = 0, threads: int = 1) -> tuple[SweepOutcome, ...]:
    """Run `sweeps` randomized perturbation sweeps against one rule set."""
    spec = rule_set(name)
    if sweeps < 1:
        raise DomainError(f"sweeps must be >= 1, got {sweeps}")
    if threads < 1:
        raise DomainError(f"threads must be >= 1, got {threads}")
    if threads == 1:
        return tuple(_outcome(spec, master_seed, i) for i in range(sweeps))
    jobs = [(name, master_seed, i) for i in range(sweeps)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return tuple(pool.map(_certify_worker, jobs, chunksize=max(1, sweeps // (threads * 4))))


def outcome_counts(outcomes) -> dict[str, int]:
    passed = sum(1 for o in outcomes if o.passed)
    inconclusive = sum(1 for o in outcomes if o.inconclusive)
    return {"passed": passed, "failed": len(outcomes) - passed - inconclusive, "inconclusive": inconclusive}
