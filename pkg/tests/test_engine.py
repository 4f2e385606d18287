"""Run protocol: hand-traced runs, determinism, conservation, censoring."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from banditlab.arms import Bernoulli, Gaussian
from banditlab.choosing import ArgmaxMean, FixedArm
from banditlab.engine import StrategySpec, run_strategy
from banditlab.errors import ConsistencyError, DomainError
from banditlab.rng import SeedStream
from banditlab.sampling import Greedy, RoundRobin, ThompsonGaussian, UniformRandom
from banditlab.stopping import FirstSuccess, FixedHorizon
from banditlab.table import CounterfactualTable


def _run(strategy, table, seed=0, cap=10_000, record=True):
    return run_strategy(strategy, table, SeedStream(seed), cap=cap, record=record)


def test_round_robin_fixed_horizon_counts():
    table = CounterfactualTable(1, (Gaussian(0, 1), Gaussian(0, 1), Gaussian(0, 1)))
    strat = StrategySpec(RoundRobin(), FixedHorizon(6), FixedArm(1))
    tr = _run(strat, table)
    assert tr.counts == (2, 2, 2)
    assert tr.stop_time == 6
    assert tr.actions == (1, 2, 3, 1, 2, 3)
    assert not tr.censored
    assert tr.chosen == 1


def test_alternating_first_success_hand_trace():
    # arm-1 column forced to (0, 0, 1): failures at t=1,3 then success at
    # t=5, so the run stops at t=5 having pulled arm 1 three times
    table = CounterfactualTable(3, (Bernoulli(0.5), Bernoulli(0.5)))
    table = table.with_override(1, 1, 0.0).with_override(2, 1, 0.0).with_override(3, 1, 1.0)
    strat = StrategySpec(RoundRobin(), FirstSuccess(arm=1, target=1.0), FixedArm(1))
    tr = _run(strat, table)
    assert tr.stop_time == 5
    assert tr.counts[0] == 3
    assert tr.counts[1] == 2
    assert tr.mean(1) == pytest.approx(1.0 / 3.0)
    assert tr.actions == (1, 2, 1, 2, 1)


def test_trace_is_pure_function_of_inputs():
    table = CounterfactualTable(77, (Gaussian(1, 1), Gaussian(0, 1)))
    strat = StrategySpec(ThompsonGaussian(), FixedHorizon(40), ArgmaxMean())
    t1 = _run(strat, table, seed=5)
    t2 = _run(strat, table, seed=5)
    assert t1 == t2
    t3 = _run(strat, table, seed=6)
    assert t3 != t1


def test_rewards_replay_against_table():
    table = CounterfactualTable(11, (Gaussian(0, 1), Gaussian(0, 1)))
    strat = StrategySpec(UniformRandom(), FixedHorizon(50), FixedArm(1))
    tr = _run(strat, table, seed=3)
    seen = [0, 0]
    for a, y in zip(tr.actions, tr.rewards):
        seen[a - 1] += 1
        assert y == table.cell(seen[a - 1], a)
    assert tuple(seen) == tr.counts


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=1, max_value=60))
def test_counts_conserve_time(seed, horizon):
    table = CounterfactualTable(seed, (Gaussian(0, 1), Bernoulli(0.3), Gaussian(1, 2)))
    strat = StrategySpec(UniformRandom(), FixedHorizon(horizon), FixedArm(2))
    tr = _run(strat, table, seed=seed)
    assert sum(tr.counts) == tr.stop_time == horizon


def test_uniform_random_allocation_is_even():
    # E[N_k] = T/K; MC check with a 3-sigma band
    T, K, reps = 30, 3, 400
    arms = tuple(Gaussian(0, 1) for _ in range(K))
    strat = StrategySpec(UniformRandom(), FixedHorizon(T), FixedArm(1))
    totals = np.zeros(K)
    for r in range(reps):
        table = CounterfactualTable(1000 + r, arms)
        totals += _run(strat, table, seed=1000 + r).counts
    avg = totals / reps
    se = np.sqrt(T * (1 / K) * (1 - 1 / K) / reps)
    assert np.all(np.abs(avg - T / K) < 3 * se + 1e-9)


def test_censoring_at_cap():
    # a success target that can never fire: arm 1 forced to zeros
    table = CounterfactualTable(0, (Bernoulli(0.0), Bernoulli(0.5)))
    strat = StrategySpec(RoundRobin(), FirstSuccess(arm=1, target=1.0), FixedArm(1))
    tr = _run(strat, table, cap=20)
    assert tr.censored
    assert tr.stop_time == 20
    assert tr.chosen is None


def test_record_false_drops_path_only():
    table = CounterfactualTable(4, (Gaussian(0, 1), Gaussian(0, 1)))
    strat = StrategySpec(RoundRobin(), FixedHorizon(8), ArgmaxMean())
    full = _run(strat, table, seed=9, record=True)
    slim = _run(strat, table, seed=9, record=False)
    assert slim.actions is None and slim.rewards is None
    assert slim.counts == full.counts
    assert slim.sums == full.sums
    assert slim.chosen == full.chosen


def test_counts_at_prefix():
    table = CounterfactualTable(4, (Gaussian(0, 1), Gaussian(0, 1)))
    strat = StrategySpec(RoundRobin(), FixedHorizon(5), FixedArm(1))
    tr = _run(strat, table)
    assert tr.counts_at(0) == (0, 0)
    assert tr.counts_at(3) == (2, 1)
    assert tr.counts_at(5) == tr.counts
    with pytest.raises(DomainError):
        tr.counts_at(6)


class _BadRule:
    def probabilities(self, hist, seeds):
        return (0.6, 0.6)


def test_bad_allocation_vector_raises():
    table = CounterfactualTable(0, (Gaussian(0, 1), Gaussian(0, 1)))
    strat = StrategySpec(_BadRule(), FixedHorizon(3), FixedArm(1))
    with pytest.raises(ConsistencyError):
        _run(strat, table)


def test_cap_validation():
    table = CounterfactualTable(0, (Gaussian(0, 1),))
    strat = StrategySpec(RoundRobin(), FixedHorizon(3), FixedArm(1))
    with pytest.raises(DomainError):
        run_strategy(strat, table, SeedStream(0), cap=0)
