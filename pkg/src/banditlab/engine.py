"""The run protocol: repeatedly sample, update, and query stopping.

Round t+1 of a run:

  1. the sampling rule maps the history of the first t pulls to an
     allocation vector nu over arms (must sum to 1 within 1e-12);
  2. the keyed uniform in slot (t, 0) picks the arm A whose cumulative
     interval contains it (a one-hot vector skips the seed entirely,
     which is observationally identical);
  3. the pull reveals table cell (N_A + 1, A);
  4. the stopping rule is queried; if it fires, the choosing rule picks
     the reported arm and the trace is final.

A run that reaches `cap` pulls without stopping is censored: it carries
its truncated statistics but no chosen arm.

Everything a run consumes is keyed off (master seed, indices), so a
trace is a pure function of (strategy, table, seeds, cap).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import rng
from .errors import ConsistencyError, DomainError, UndefinedMeanError


class History:
    """Mutable view of a run in progress; rules read, the runner writes.

    Arms are 0-based here; the public trace is 1-based.
    """

    __slots__ = ("n_arms", "t", "counts", "sums", "last_draw")

    def __init__(self, n_arms: int):
        self.n_arms = n_arms
        self.t = 0
        self.counts = [0] * n_arms
        self.sums = [0.0] * n_arms
        self.last_draw: list[float | None] = [None] * n_arms

    def mean(self, j: int) -> float:
        n = self.counts[j]
        if n < 1:
            raise UndefinedMeanError(f"arm {j + 1} has no observations")
        return self.sums[j] / n

    def means(self) -> list[float]:
        return [self.mean(j) for j in range(self.n_arms)]


@dataclass(frozen=True)
class StrategySpec:
    """A full strategy: how to sample, when to stop, what to report."""

    sampling: object
    stopping: object
    choosing: object


@dataclass(frozen=True)
class Trace:
    """Everything a finished run reveals.

    actions/rewards are None when the caller asked the runner not to
    record the step-by-step path (bias sweeps don't need it).
    """

    actions: tuple[int, ...] | None
    rewards: tuple[float, ...] | None
    counts: tuple[int, ...]
    sums: tuple[float, ...]
    last_draws: tuple[float | None, ...]
    stop_time: int
    censored: bool
    chosen: int | None

    @property
    def n_arms(self) -> int:
        return len(self.counts)

    def mean(self, k: int) -> float:
        """Stopped sample mean of arm k (1-based)."""
        n = self.counts[k - 1]
        if n < 1:
            raise UndefinedMeanError(f"arm {k} has no observations")
        return self.sums[k - 1] / n

    def counts_at(self, t: int) -> tuple[int, ...]:
        """Pull counts after the first t steps (needs a recorded path)."""
        if self.actions is None:
            raise DomainError("trace was run without path recording")
        if not 0 <= t <= self.stop_time:
            raise DomainError(f"t must lie in 0..{self.stop_time}, got {t}")
        counts = [0] * self.n_arms
        for a in self.actions[:t]:
            counts[a - 1] += 1
        return tuple(counts)


def run_strategy(strategy: StrategySpec, table, seeds: rng.SeedStream, cap: int, record: bool = True) -> Trace:
    """Execute one run against a table; see the module docstring."""
    if cap < 1:
        raise DomainError(f"cap must be >= 1, got {cap}")
    n_arms = table.n_arms
    hist = History(n_arms)
    counts, sums, last = hist.counts, hist.sums, hist.last_draw
    probs_fn = strategy.sampling.probabilities
    stop_fn = strategy.stopping.should_stop
    cell = table.cell
    uniform = seeds.uniform
    actions: list[int] | None = [] if record else None
    rewards: list[float] | None = [] if record else None

    t = 0
    stopped = False
    while t < cap:
        p = probs_fn(hist, seeds)
        if len(p) != n_arms or min(p) < 0.0 or abs(sum(p) - 1.0) > 1e-12:
            raise ConsistencyError(f"allocation vector {p!r} is not a probability vector over {n_arms} arms")
        top = max(p)
        if top == 1.0:
            j = p.index(top)
        else:
            u = uniform(t, 0)
            cum = 0.0
            j = n_arms - 1
            for jj in range(n_arms):
                cum += p[jj]
                if u < cum:
                    j = jj
                    break
        i = counts[j] + 1
        y = cell(i, j + 1)
        t += 1
        hist.t = t
        counts[j] = i
        sums[j] += y
        last[j] = y
        if record:
            actions.append(j + 1)
            rewards.append(y)
        if stop_fn(hist):
            stopped = True
            break

    chosen = None
    if stopped:
        chosen = strategy.choosing.choose_stats(counts, sums, last, lambda: uniform(t, rng.CHOOSING_SLOT))

    return Trace(
        actions=tuple(actions) if actions is not None else None,
        rewards=tuple(rewards) if rewards is not None else None,
        counts=tuple(counts),
        sums=tuple(sums),
        last_draws=tuple(last),
        stop_time=t,
        censored=not stopped,
        chosen=chosen,
    )
