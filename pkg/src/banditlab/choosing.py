"""Choosing rules: pick the arm reported once the run has stopped.

All argmax-style rules break ties toward the lowest arm index.  The one
randomized rule consumes a single keyed uniform for the stopped round.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConsistencyError, DomainError, UndefinedMeanError


def _argmax(values) -> int:
    best, best_v = 0, float("-inf")
    for j, v in enumerate(values):
        if v > best_v:
            best, best_v = j, v
    return best


def _means(counts, sums, what: str) -> list[float]:
    means = []
    for j, n in enumerate(counts):
        if n < 1:
            raise UndefinedMeanError(f"{what} needs a sample mean for arm {j + 1}, which has no observations")
        means.append(sums[j] / n)
    return means


@dataclass(frozen=True)
class FixedArm:
    """Always report the same arm."""

    arm: int

    def __post_init__(self):
        if self.arm < 1:
            raise DomainError(f"arm index must be >= 1, got {self.arm}")

    def choose_stats(self, counts, sums, last_draw, u_fn) -> int:
        if self.arm > len(counts):
            raise DomainError(f"arm index {self.arm} outside 1..{len(counts)}")
        return self.arm


@dataclass(frozen=True)
class ArgmaxMean:
    """Report the arm with the largest stopped sample mean."""

    def choose_stats(self, counts, sums, last_draw, u_fn) -> int:
        return _argmax(_means(counts, sums, "choosing by mean")) + 1


@dataclass(frozen=True)
class ArgmaxCount:
    """Report the arm pulled most often."""

    def choose_stats(self, counts, sums, last_draw, u_fn) -> int:
        return _argmax(counts) + 1


@dataclass(frozen=True)
class ArgmaxLastObservation:
    """Report the arm whose most recent reward is largest."""

    def choose_stats(self, counts, sums, last_draw, u_fn) -> int:
        for j, n in enumerate(counts):
            if n < 1:
                raise UndefinedMeanError(f"arm {j + 1} was never observed")
        return _argmax(last_draw) + 1


@dataclass(frozen=True)
class RankProbability:
    """Report the arm of sample-mean rank r with probability probs[r-1].

    The aux uniform partitions (0,1) into arm-indexed intervals whose
    lengths are each arm's rank probability, mirroring how the runner
    selects arms.  With this coupling, raising an arm's rewards can only
    grow that arm's own interval, so the realized choice indicator is
    monotone along a single-cell perturbation, not just in distribution.
    """

    probs: tuple[float, ...]

    def __post_init__(self):
        if any(p < 0.0 for p in self.probs):
            raise DomainError("rank probabilities must be non-negative")

    def choose_stats(self, counts, sums, last_draw, u_fn) -> int:
        n_arms = len(counts)
        if len(self.probs) != n_arms:
            raise DomainError(f"need {n_arms} rank probabilities, got {len(self.probs)}")
        total = sum(self.probs)
        if abs(total - 1.0) > 1e-12:
            raise ConsistencyError(f"rank probabilities sum to {total!r}, not 1")
        means = _means(counts, sums, "ranking by mean")
        order = sorted(range(n_arms), key=lambda j: (-means[j], j))
        rank_of = [0] * n_arms
        for r, j in enumerate(order):
            rank_of[j] = r
        u = u_fn()
        cum = 0.0
        for j in range(n_arms):
            cum += self.probs[rank_of[j]]
            if u < cum:
                return j + 1
        return n_arms


ChoosingRule = FixedArm | ArgmaxMean | ArgmaxCount | ArgmaxLastObservation | RankProbability


def choose(rule, trace, u: float | None = None) -> int:
    """Arm reported for a stopped trace; `u` feeds randomized rules."""
    if trace.censored:
        raise DomainError("cannot choose an arm for a censored trace")

    def u_fn() -> float:
        if u is None:
            raise DomainError("this choosing rule needs an aux uniform")
        return u

    return rule.choose_stats(trace.counts, trace.sums, trace.last_draws, u_fn)
