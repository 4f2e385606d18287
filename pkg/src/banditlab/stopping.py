"""Stopping rules: decide after each pull whether the run ends now.

`should_stop` is queried with the history after t pulls.  Rules that
compare sample means treat an arm with no observations as "not ready"
and simply decline to stop, except where a hard time limit forces the
decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

from .errors import DomainError


@lru_cache(maxsize=None)
def slrt_boundary(t: int, w: float, alpha: float, sigma: float) -> float:
    """Mean-difference boundary of the sequential likelihood-ratio test.

    (2 sigma / t) sqrt( (t + 2w) log( (1/(2 alpha)) sqrt((t + 2w)/(2w)) + 1 ) ),
    defined for even t >= 2.
    """
    if t < 2 or t % 2 != 0:
        raise DomainError(f"boundary is defined for even t >= 2, got {t}")
    if w <= 0.0 or sigma <= 0.0 or not 0.0 < alpha < 1.0:
        raise DomainError("need w > 0, sigma > 0 and alpha in (0,1)")
    ratio = (t + 2.0 * w) / (2.0 * w)
    return (2.0 * sigma / t) * math.sqrt((t + 2.0 * w) * math.log(math.sqrt(ratio) / (2.0 * alpha) + 1.0))


@dataclass(frozen=True)
class FixedHorizon:
    """Stop after exactly `horizon` pulls."""

    horizon: int

    def __post_init__(self):
        if self.horizon < 1:
            raise DomainError(f"horizon must be >= 1, got {self.horizon}")

    def should_stop(self, hist) -> bool:
        return hist.t >= self.horizon


@dataclass(frozen=True)
class FirstSuccess:
    """Stop once the latest draw from `arm` equals `target`."""

    arm: int
    target: float = 1.0

    def should_stop(self, hist) -> bool:
        j = self.arm - 1
        return hist.counts[j] >= 1 and hist.last_draw[j] == self.target


@dataclass(frozen=True)
class MeanBoundary:
    """Stop once the sample mean of `arm` strictly exceeds the boundary.

    The boundary is a constant or a callable of the current time t.
    """

    arm: int
    boundary: Union[float, Callable[[int], float]]

    def _level(self, t: int) -> float:
        b = self.boundary
        return b(t) if callable(b) else b

    def should_stop(self, hist) -> bool:
        j = self.arm - 1
        n = hist.counts[j]
        if n < 1:
            return False
        return hist.sums[j] / n > self._level(hist.t)


@dataclass(frozen=True)
class LineCrossing:
    """Stop once the running sum of `arm` reaches a line in its pull count:
    S_k(t) >= slope * N_k(t) + intercept."""

    arm: int
    slope: float
    intercept: float

    def __post_init__(self):
        if self.intercept <= 0.0:
            raise DomainError(f"intercept must be positive, got {self.intercept!r}")

    def should_stop(self, hist) -> bool:
        j = self.arm - 1
        return hist.sums[j] >= self.slope * hist.counts[j] + self.intercept


@dataclass(frozen=True)
class SLRT:
    """Two-arm sequential test: stop at even t when the mean difference
    mu_hat_1 - mu_hat_2 reaches slrt_boundary(t), or at t = max_time."""

    w: float = 10.0
    alpha: float = 0.1
    sigma: float = 1.0
    max_time: int = 200

    def __post_init__(self):
        if self.max_time < 2 or self.max_time % 2 != 0:
            raise DomainError(f"max_time must be even and >= 2, got {self.max_time}")
        slrt_boundary(2, self.w, self.alpha, self.sigma)  # validates the rest

    def should_stop(self, hist) -> bool:
        if hist.n_arms < 2:
            raise DomainError("the sequential test needs two arms")
        t = hist.t
        if t >= self.max_time:
            return True
        if t % 2 != 0:
            return False
        n1, n2 = hist.counts[0], hist.counts[1]
        if n1 < 1 or n2 < 1:
            return False
        diff = hist.sums[0] / n1 - hist.sums[1] / n2
        return diff >= slrt_boundary(t, self.w, self.alpha, self.sigma)


@dataclass(frozen=True)
class LilUCBCount:
    """Stop once one arm holds the lion's share of the pulls:
    N_k(t) >= 1 + lam * sum_{j != k} N_j(t), queried for t > K."""

    lam: float = 9.0

    def __post_init__(self):
        if self.lam <= 0.0:
            raise DomainError(f"lam must be positive, got {self.lam!r}")

    def should_stop(self, hist) -> bool:
        t = hist.t
        if t <= hist.n_arms:
            return False
        for n in hist.counts:
            if n >= 1.0 + self.lam * (t - n):
                return True
        return False


@dataclass(frozen=True)
class GapStop:
    """Stop at full cycles t = K, 2K, ... once the two largest sample
    means are separated by more than `gap`; always stop after
    `max_cycles` cycles."""

    gap: float
    max_cycles: int

    def __post_init__(self):
        if self.gap < 0.0:
            raise DomainError(f"gap must be non-negative, got {self.gap!r}")
        if self.max_cycles < 1:
            raise DomainError(f"max_cycles must be >= 1, got {self.max_cycles}")

    def should_stop(self, hist) -> bool:
        n_arms = hist.n_arms
        if n_arms < 2:
            raise DomainError("the gap test needs at least two arms")
        t = hist.t
        if t == 0 or t % n_arms != 0:
            return False
        if t >= self.max_cycles * n_arms:
            return True
        counts, sums = hist.counts, hist.sums
        top = second = float("-inf")
        for j in range(n_arms):
            if counts[j] < 1:
                return False
            m = sums[j] / counts[j]
            if m > top:
                top, second = m, top
            elif m > second:
                second = m
        return top > second + self.gap


StoppingRule = FixedHorizon | FirstSuccess | MeanBoundary | LineCrossing | SLRT | LilUCBCount | GapStop


def should_stop(rule, hist) -> bool:
    """True when the run ends after the history's last pull."""
    return rule.should_stop(hist)
