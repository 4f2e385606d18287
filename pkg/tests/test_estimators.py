"""Estimators: exact oracles, Wald and covariance identities, reports."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from banditlab.arms import Bernoulli, Gaussian
from banditlab.choosing import ArgmaxLastObservation, FixedArm
from banditlab.engine import StrategySpec
from banditlab.errors import DomainError, NoDataError
from banditlab.estimators import (
    RepRecord,
    aggregate_report,
    covariance_bias_check,
    geometric_stop_bias_exact,
    mc_bias,
    wald_residual,
)
from banditlab.sampling import RoundRobin
from banditlab.stopping import FirstSuccess, FixedHorizon

ALTERNATE_FIRST_SUCCESS = StrategySpec(RoundRobin(), FirstSuccess(arm=1, target=1.0), FixedArm(1))


def test_geometric_bias_series_agrees_with_closed_form():
    for mu in (0.05, 0.2, 0.5, 0.8, 0.99):
        g = geometric_stop_bias_exact(mu)
        assert g.series == pytest.approx(g.closed_form, abs=1e-10)


def test_geometric_bias_frozen_values():
    assert geometric_stop_bias_exact(0.5).closed_form == pytest.approx(math.log(2.0) - 0.5, abs=1e-15)
    assert geometric_stop_bias_exact(0.5).closed_form == pytest.approx(0.193147, abs=1e-6)
    assert geometric_stop_bias_exact(0.2).closed_form == pytest.approx(0.202359, abs=1e-6)


def test_geometric_bias_vanishes_near_one():
    assert geometric_stop_bias_exact(1.0 - 1e-9).closed_form == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(DomainError):
        geometric_stop_bias_exact(0.0)
    with pytest.raises(DomainError):
        geometric_stop_bias_exact(1.0)


def test_alternating_first_success_bias_matches_exact_value():
    mu = 0.5
    report = mc_bias(ALTERNATE_FIRST_SUCCESS, (Bernoulli(mu), Bernoulli(mu)), reps=3000, master_seed=101)
    arm1 = report.per_arm[0]
    exact = geometric_stop_bias_exact(mu).closed_form
    assert arm1.bias == pytest.approx(exact, abs=3 * arm1.std_err)
    assert arm1.bias > 0


def test_wald_residual_zero_for_fixed_horizon():
    strat = StrategySpec(RoundRobin(), FixedHorizon(20), FixedArm(1))
    records = _records(strat, (Gaussian(1.0, 1.0),), reps=500, seed=7)
    w = wald_residual(records, 1, 1.0)
    assert abs(w.residual) <= 3 * w.std_err


def test_wald_residual_zero_for_adaptive_stop():
    records = _records(ALTERNATE_FIRST_SUCCESS, (Bernoulli(0.5), Bernoulli(0.5)), reps=2000, seed=13)
    for k in (1, 2):
        w = wald_residual(records, k, 0.5)
        assert abs(w.residual) <= 3 * w.std_err


def test_covariance_identity_on_adaptive_stop():
    records = _records(ALTERNATE_FIRST_SUCCESS, (Bernoulli(0.5), Bernoulli(0.5)), reps=2000, seed=29)
    chk = covariance_bias_check(records, 1, 0.5)
    assert abs(chk.discrepancy) <= 3 * chk.combined_std_err
    # the bias is genuinely positive here, so both sides are away from 0
    assert chk.lhs > 0


def test_covariance_rhs_zero_when_counts_deterministic():
    strat = StrategySpec(RoundRobin(), FixedHorizon(10), FixedArm(1))
    records = _records(strat, (Gaussian(0.0, 1.0), Gaussian(0.0, 1.0)), reps=200, seed=3)
    chk = covariance_bias_check(records, 1, 0.0)
    assert chk.rhs == 0.0
    assert chk.combined_std_err > 0


def test_argmax_of_two_standard_normals():
    # E[max(Z1, Z2)] via numerical integration, independently of any run
    oracle, err = quad(lambda x: 2.0 * x * math.exp(-x * x / 2.0) / math.sqrt(2 * math.pi) * 0.5 * (1 + math.erf(x / math.sqrt(2))), -12, 12)
    assert err < 1e-9
    assert oracle == pytest.approx(1.0 / math.sqrt(math.pi), abs=1e-9)
    strat = StrategySpec(RoundRobin(), FixedHorizon(2), ArgmaxLastObservation())
    report = mc_bias(strat, (Gaussian(0, 1), Gaussian(0, 1)), reps=2000, master_seed=55)
    assert report.chosen.bias == pytest.approx(oracle, abs=3 * report.chosen.std_err)


def test_chosen_bias_decomposes_over_conditionals():
    strat = StrategySpec(RoundRobin(), FixedHorizon(2), ArgmaxLastObservation())
    report = mc_bias(strat, (Gaussian(0, 1), Gaussian(0, 1)), reps=500, master_seed=19)
    assert report.chosen.decomposition_gap is not None
    assert report.chosen.decomposition_gap <= 1e-12
    assert sum(c.n for c in report.chosen.conditional) == report.chosen.n


def test_mc_bias_is_deterministic():
    strat = StrategySpec(RoundRobin(), FixedHorizon(4), FixedArm(2))
    arms = (Gaussian(0, 1), Gaussian(1, 1))
    r1 = mc_bias(strat, arms, reps=50, master_seed=42)
    r2 = mc_bias(strat, arms, reps=50, master_seed=42)
    assert r1 == r2


def test_censored_reps_are_excluded_from_bias_but_counted():
    # impossible success target: every rep censors at the cap
    strat = StrategySpec(RoundRobin(), FirstSuccess(arm=1, target=1.0), FixedArm(1))
    report = mc_bias(strat, (Bernoulli(0.0), Bernoulli(0.5)), reps=10, master_seed=1, cap=8)
    assert report.censored_reps == 10
    assert report.per_arm[0].n_used == 0
    assert report.per_arm[0].bias is None
    assert report.chosen.n == 0


def test_empty_collections_raise():
    with pytest.raises(NoDataError):
        aggregate_report((0.0,), [])
    one = RepRecord(stop_time=1, censored=False, counts=(1,), means=(0.5,), chosen=1)
    with pytest.raises(NoDataError):
        wald_residual([one], 1, 0.0)
    with pytest.raises(NoDataError):
        covariance_bias_check([one], 1, 0.0)


def _records(strategy, arms, reps, seed):
    from banditlab.estimators import record_from_trace
    from banditlab.engine import run_strategy
    from banditlab.rng import SeedStream, derive_rep_seed
    from banditlab.table import CounterfactualTable

    out = []
    for r in range(reps):
        s = derive_rep_seed(seed, r)
        out.append(record_from_trace(run_strategy(strategy, CounterfactualTable(s, arms), SeedStream(s), cap=100_000, record=False)))
    return out
