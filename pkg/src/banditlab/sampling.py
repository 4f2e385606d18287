"""Sampling rules: allocation probabilities for the next pull.

A rule maps the history after t pulls to a probability vector nu_{t+1}
over arms.  The runner turns that vector into an arm by partitioning
(0,1) at the round's keyed seed, so deterministic rules simply return a
one-hot vector.

Adaptive rules pull each arm once in index order before scoring
(`warmup`, rounds t <= K); after warmup every arm has at least one
observation so sample means are defined.

Index-policy rules break score ties toward the lowest arm index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .arms import normal_inv_cdf
from .errors import ConsistencyError, DomainError, UndefinedMeanError

_NEG_INF = float("-inf")


@lru_cache(maxsize=None)
def _onehot(n_arms: int, j: int) -> tuple[float, ...]:
    v = [0.0] * n_arms
    v[j] = 1.0
    return tuple(v)


@lru_cache(maxsize=None)
def _flat(n_arms: int) -> tuple[float, ...]:
    return tuple([1.0 / n_arms] * n_arms)


def _warmup_probs(hist) -> tuple[float, ...] | None:
    # one pull per arm in index order for rounds t+1 <= K
    if hist.t < hist.n_arms:
        return _onehot(hist.n_arms, hist.t)
    return None


def _argmax(scores: Sequence[float]) -> int:
    best, best_score = 0, _NEG_INF
    for j, s in enumerate(scores):
        if s > best_score:
            best, best_score = j, s
    return best


@lru_cache(maxsize=None)
def ucb_bonus(delta: float, n: int) -> float:
    """Exploration bonus sqrt(2 log(1/delta) / n)."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0,1), got {delta!r}")
    if n < 1:
        raise DomainError(f"bonus needs n >= 1, got {n}")
    return math.sqrt(2.0 * math.log(1.0 / delta) / n)


@lru_cache(maxsize=None)
def lil_ucb_bonus(n: int, eps: float, beta: float, delta: float, sigma: float) -> float:
    """Law-of-the-iterated-logarithm bonus for n observations.

    (1+beta)(1+sqrt(eps)) sqrt(2 sigma^2 (1+eps) log(log((1+eps)n)/delta) / n).
    The inner logarithm's argument is clamped to e so the log-log term
    stays non-negative for small n.
    """
    if n < 1:
        raise DomainError(f"bonus needs n >= 1, got {n}")
    if eps <= 0.0 or beta <= 0.0 or sigma <= 0.0:
        raise DomainError("eps, beta and sigma must be positive")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0,1), got {delta!r}")
    inner = max((1.0 + eps) * n, math.e)
    loglog = math.log(math.log(inner) / delta)
    return (1.0 + beta) * (1.0 + math.sqrt(eps)) * math.sqrt(2.0 * sigma * sigma * (1.0 + eps) * loglog / n)


@lru_cache(maxsize=None)
def _gaussian_posterior_var(prior_sd: float, sd: float, n: int) -> tuple[float, float]:
    precision = 1.0 / (prior_sd * prior_sd) + n / (sd * sd)
    var = 1.0 / precision
    return var, math.sqrt(var)


def gaussian_posterior(prior_mean: float, prior_sd: float, sd: float, s: float, n: int) -> tuple[float, float]:
    """Posterior (mean, sd) for a N(prior_mean, prior_sd^2) prior and n
    observations with sum s from a N(mu, sd^2) likelihood."""
    var, post_sd = _gaussian_posterior_var(prior_sd, sd, n)
    post_mean = (prior_mean / (prior_sd * prior_sd) + s / (sd * sd)) * var
    return post_mean, post_sd


def posterior_sample_expfamily(family, prior: tuple, s: float, n: int, u: float):
    """Single posterior draw via the inverse posterior CDF at u.

    family "gaussian" takes prior (mu0, sigma0, sigma); "beta-bernoulli"
    takes prior (n0, m0) with s successes out of n.  Any callable
    family(prior, s, n, u) plugs in another conjugate pair.  The draw is
    non-decreasing in s at fixed (n, u) for both built-in families.
    """
    if callable(family):
        return family(prior, s, n, u)
    if family == "gaussian":
        mu0, sigma0, sigma = prior
        m, post_sd = gaussian_posterior(mu0, sigma0, sigma, s, n)
        return m + post_sd * normal_inv_cdf(u)
    if family == "beta-bernoulli":
        n0, m0 = prior
        a = n0 + s
        b = m0 + n - s
        if a <= 0.0 or b <= 0.0:
            raise DomainError(f"posterior Beta({a}, {b}) is improper")
        if not 0.0 < u < 1.0:
            raise DomainError(f"uniform must lie strictly inside (0,1), got {u!r}")
        from scipy.special import betaincinv

        return float(betaincinv(a, b, u))
    raise DomainError(f"unknown family {family!r}")


@dataclass(frozen=True)
class RoundRobin:
    """Deterministic cycle 1, 2, ..., K, 1, 2, ..."""

    def probabilities(self, hist, seeds) -> tuple[float, ...]:
        return _onehot(hist.n_arms, hist.t % hist.n_arms)


@dataclass(frozen=True)
class UniformRandom:
    """Nonadaptive random allocation: every arm gets mass 1/K."""

    def probabilities(self, hist, seeds) -> tuple[float, ...]:
        return _flat(hist.n_arms)


@dataclass(frozen=True)
class Greedy:
    """Pull the arm with the largest sample mean."""

    warmup: bool = True

    def probabilities(self, hist, seeds) -> tuple[float, ...]:
        if self.warmup:
            w = _warmup_probs(hist)
            if w is not None:
                return w
        return _onehot(hist.n_arms, _argmax(hist.means()))


@dataclass(frozen=True)
class MinMeanGreedy:
    """Pull the arm with the *smallest* sample mean.

    A deliberately pessimistic fixture: raising an arm's observed rewards
    makes this rule avoid the arm, so its pull counts move the wrong way.
    The certifier is expected to reject it.
    """

    warmup: bool = True

    def probabilities(self, hist, seeds) -> tuple[float, ...]:
        if self.warmup:
            w = _warmup_probs(hist)
            if w is not None:
                return w
        return _onehot(hist.n_arms, _argmax([-m for m in hist.means()]))


@dataclass(frozen=True)
class EpsGreedy:
    """Exploit the best mean with mass 1-eps, spread eps over the rest."""

    eps: float
    warmup: bool = True

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise DomainError(f"eps must lie in [0,1], got {self.eps!r}")

    def probabilities(self, hist, seeds) -> tuple[float, ...]:
        if self.warmup:
            w = _warmup_probs(hist)
            if w is not None:
                return w
        n_arms = hist.n_arms
        if n_arms == 1:
            return (1.0,)
        best = _argmax(hist.means())
        base = self.eps / (n_arms - 1)
        v = [base] * n_arms
        v[best] = 1.0 - self.eps
        return tuple(v)


@dataclass(frozen=True)
class UCB:
    """Optimism with bonus sqrt(2 log(1/delta) / N_k)."""

    delta: float
    warmup: bool = True

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0,1), got {self.delta!r}")

    def probabilities(self, hist, seeds) -> tuple[float, ...]:
        if self.warmup:
            w = _warmup_probs(hist)
            if w is not None:
                return w
        counts, sums, delta = hist.counts, hist.sums, self.delta
        best, best_score = 0, _NEG_INF
        for j in range(hist.n_arms):
            n = counts[j]
            score = sums[j] / n + ucb_bonus(delta, n)
            if score > best_score:
                best, best_score = j, score
        return _onehot(hist.n_arms, best)


@dataclass(frozen=True)
class LilUCB:
    """Optimism with the iterated-logarithm bonus."""

    eps: float = 0.01
    beta: float = 1.0
    delta: float = 0.005
    sigma: float = 1.0
    warmup: bool = True

    def probabilities(self, hist, seeds) -> tuple[float, ...]:
        if self.warmup:
            w = _warmup_probs(hist)
            if w is not None:
                return w
        counts, sums = hist.counts, hist.sums
        eps, beta, delta, sigma = self.eps, self.beta, self.delta, self.sigma
        best, best_score = 0, _NEG_INF
        for j in range(hist.n_arms):
            n = counts[j]
            score = sums[j] / n + lil_ucb_bonus(n, eps, beta, delta, sigma)
            if score > best_score:
                best, best_score = j, score
        return _onehot(hist.n_arms, best)


@dataclass(frozen=True)
class ThompsonGaussian:
    """Posterior draws under a Gaussian prior and known-variance likelihood.

    Draw j for round t+1 uses the keyed uniform in slot (t+1, j), so a
    perturbed reward never shifts another round's randomness.
    """

    prior_mean: float = 0.0
    prior_sd: float = 1.0
    sd: float = 1.0
    warmup: bool = True

    def __post_init__(self):
        if self.prior_sd <= 0.0 or self.sd <= 0.0:
            raise DomainError("prior_sd and sd must be positive")

    def probabilities(self, hist, seeds) -> tuple[float, ...]:
        if self.warmup:
            w = _warmup_probs(hist)
            if w is not None:
                return w
        t_next = hist.t + 1
        counts, sums = hist.counts, hist.sums
        best, best_score = 0, _NEG_INF
        for j in range(hist.n_arms):
            m, post_sd = gaussian_posterior(self.prior_mean, self.prior_sd, self.sd, sums[j], counts[j])
            draw = m + post_sd * normal_inv_cdf(seeds.uniform(t_next, j + 1))
            if draw > best_score:
                best, best_score = j, draw
        return _onehot(hist.n_arms, best)


@dataclass(frozen=True)
class ThompsonBetaBernoulli:
    """Posterior draws for 0/1 rewards under a Beta(n0, m0) prior.

    Each draw is built from sums of exponential variates: the success
    budget uses n0 + S_j keyed uniforms, the failure budget m0 + N_j - S_j.
    Because the uniforms live in fixed slots (round, arm, index), flipping
    one reward from 0 to 1 only *adds* a term to the success budget and
    removes the last failure term, so the draw moves monotonically.
    """

    n0: int = 1
    m0: int = 1
    warmup: bool = True

    def __post_init__(self):
        if self.n0 < 0 or self.m0 < 0:
            raise DomainError("prior counts must be non-negative")

    def probabilities(self, hist, seeds) -> tuple[float, ...]:
        if self.warmup:
            w = _warmup_probs(hist)
            if w is not None:
                return w
        t_next = hist.t + 1
        counts, sums = hist.counts, hist.sums
        best, best_score = 0, _NEG_INF
        for j in range(hist.n_arms):
            s = sums[j]
            s_int = int(s + 0.5)
            if abs(s - s_int) > 1e-9:
                raise DomainError("Beta-Bernoulli sampling needs 0/1 rewards")
            a = 0.0
            for i in range(1, self.n0 + s_int + 1):
                a -= math.log(seeds.uniform_bb(t_next, 0, j + 1, i))
            b = 0.0
            for i in range(1, self.m0 + counts[j] - s_int + 1):
                b -= math.log(seeds.uniform_bb(t_next, 1, j + 1, i))
            if a + b == 0.0:
                raise ConsistencyError("Beta-Bernoulli draw undefined: empty prior and no data")
            ratio = a / (a + b)
            if ratio > best_score:
                best, best_score = j, ratio
        return _onehot(hist.n_arms, best)


SamplingRule = (
    RoundRobin
    | UniformRandom
    | Greedy
    | MinMeanGreedy
    | EpsGreedy
    | UCB
    | LilUCB
    | ThompsonGaussian
    | ThompsonBetaBernoulli
)


def sampling_probabilities(rule, hist, seeds) -> tuple[float, ...]:
    """Allocation vector for the next round; entries sum to 1."""
    return rule.probabilities(hist, seeds)
