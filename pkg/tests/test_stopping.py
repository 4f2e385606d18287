"""Stopping rules: boundary values, readiness, forced stops."""

import math

import pytest

from banditlab.engine import History
from banditlab.errors import DomainError
from banditlab.stopping import (
    FirstSuccess,
    FixedHorizon,
    GapStop,
    LilUCBCount,
    LineCrossing,
    MeanBoundary,
    SLRT,
    should_stop,
    slrt_boundary,
)


def _hist(counts, sums, last=None):
    h = History(len(counts))
    h.counts = list(counts)
    h.sums = list(sums)
    h.t = sum(counts)
    h.last_draw = last if last is not None else [s / c if c else None for c, s in zip(counts, sums)]
    return h


def test_slrt_boundary_value():
    # t=2, w=10, alpha=0.1, sigma=1, frozen from an independent evaluation
    assert slrt_boundary(2, 10.0, 0.1, 1.0) == pytest.approx(6.34792, abs=1e-4)
    by_hand = math.sqrt(22.0 * math.log(math.sqrt(22.0 / 20.0) / 0.2 + 1.0))
    assert slrt_boundary(2, 10.0, 0.1, 1.0) == pytest.approx(by_hand, abs=1e-12)


def test_slrt_boundary_scales_with_sigma():
    assert slrt_boundary(10, 5.0, 0.05, 3.0) == pytest.approx(3.0 * slrt_boundary(10, 5.0, 0.05, 1.0))


def test_slrt_boundary_rejects_odd_t():
    with pytest.raises(DomainError):
        slrt_boundary(3, 10.0, 0.1, 1.0)
    with pytest.raises(DomainError):
        slrt_boundary(0, 10.0, 0.1, 1.0)


def test_slrt_stops_only_at_even_times_or_max():
    rule = SLRT(w=10.0, alpha=0.1, sigma=1.0, max_time=6)
    big = 100.0
    h = _hist([1, 1], [big, 0.0])  # t = 2, huge mean gap
    assert rule.should_stop(h)
    h_odd = _hist([2, 1], [2 * big, 0.0])  # t = 3
    assert not rule.should_stop(h_odd)
    h_max = _hist([3, 3], [0.0, 0.0])  # t = 6 = max_time, no gap
    assert rule.should_stop(h_max)


def test_slrt_validates_max_time_parity():
    with pytest.raises(DomainError):
        SLRT(max_time=7)


def test_fixed_horizon():
    rule = FixedHorizon(3)
    assert not rule.should_stop(_hist([2], [0.0]))
    assert rule.should_stop(_hist([3], [0.0]))


def test_first_success_watches_latest_draw():
    rule = FirstSuccess(arm=1, target=1.0)
    assert not rule.should_stop(_hist([1, 0], [0.0, 0.0], last=[0.0, None]))
    assert rule.should_stop(_hist([3, 2], [1.0, 0.0], last=[1.0, 0.0]))
    # no observation yet: not ready
    assert not rule.should_stop(_hist([0, 1], [0.0, 0.0], last=[None, 0.0]))


def test_mean_boundary_is_strict():
    rule = MeanBoundary(arm=1, boundary=0.5)
    assert not rule.should_stop(_hist([2], [1.0]))  # mean exactly 0.5
    assert rule.should_stop(_hist([2], [1.2]))
    assert not rule.should_stop(_hist([0], [0.0]))  # not ready


def test_mean_boundary_accepts_callable():
    rule = MeanBoundary(arm=1, boundary=lambda t: 10.0 / t)
    assert not rule.should_stop(_hist([2], [9.0]))  # 4.5 <= 5
    h = _hist([4], [11.0])  # 2.75 > 2.5
    assert rule.should_stop(h)


def test_line_crossing():
    rule = LineCrossing(arm=1, slope=1.0, intercept=5.0)
    assert not rule.should_stop(_hist([3], [7.9]))
    assert rule.should_stop(_hist([3], [8.0]))  # 8 >= 3 + 5
    with pytest.raises(DomainError):
        LineCrossing(arm=1, slope=1.0, intercept=0.0)


def test_lil_count_rule():
    rule = LilUCBCount(lam=9.0)
    # 19 >= 1 + 9 * 2 at t = 21
    assert rule.should_stop(_hist([19, 1, 1], [0.0, 0.0, 0.0]))
    assert not rule.should_stop(_hist([18, 1, 1], [0.0, 0.0, 0.0]))
    # never during warmup rounds t <= K
    assert not rule.should_stop(_hist([3, 0, 0], [0.0, 0.0, 0.0]))


def test_gap_stop_only_on_full_cycles():
    rule = GapStop(gap=0.5, max_cycles=4)
    h = _hist([2, 1], [10.0, 0.0])  # t = 3, not a multiple of K = 2
    assert not rule.should_stop(h)
    h = _hist([2, 2], [10.0, 0.0])  # t = 4, gap 5 - 0 > 0.5
    assert rule.should_stop(h)
    h = _hist([2, 2], [1.0, 0.2])  # gap 0.4 <= 0.5
    assert not rule.should_stop(h)
    h = _hist([4, 4], [1.0, 0.2])  # t = 8 = max_cycles * K: forced
    assert rule.should_stop(h)


def test_should_stop_delegates():
    assert should_stop(FixedHorizon(1), _hist([1], [0.0]))
