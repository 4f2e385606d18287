"""Bias estimation and the identities that certify it.

The central quantities, per replication r and arm k, are the stopped
sample mean mu_hat_k, the pull count N_k and the reported arm kappa.
Aggregation works in the (mu_hat, N) domain rather than on raw reward
sums: those are exactly the values that survive a round trip through
the raw CSV, so a summary recomputed from disk is bit-identical.

Censoring policy.  Bias averages condition on the run having actually
stopped, so censored replications are excluded there and counted.  The
Wald residual and the covariance identity instead include censored
replications at their truncated state: truncation at the cap is itself
a stopping time, for which both identities hold exactly, whereas
dropping heavy-tailed runs would introduce a real distortion.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .engine import StrategySpec, Trace, run_strategy
from .errors import DomainError, NoDataError
from .rng import SeedStream, derive_rep_seed
from .table import CounterfactualTable


@dataclass(frozen=True)
class RepRecord:
    """Per-replication extract sufficient for every aggregate."""

    stop_time: int
    censored: bool
    counts: tuple[int, ...]
    means: tuple[float | None, ...]
    chosen: int | None


def record_from_trace(trace: Trace) -> RepRecord:
    means = tuple(s / n if n >= 1 else None for s, n in zip(trace.sums, trace.counts))
    return RepRecord(
        stop_time=trace.stop_time,
        censored=trace.censored,
        counts=trace.counts,
        means=means,
        chosen=trace.chosen,
    )


def sample_mean(trace: Trace, k: int) -> float:
    """Stopped sample mean of arm k; error when the arm was never pulled."""
    return trace.mean(k)


@dataclass(frozen=True)
class GeomBias:
    """Exact positive bias of the stopped mean in the alternating
    first-success run: E[1/N] - mu for N geometric(mu)."""

    closed_form: float
    series: float


def geometric_stop_bias_exact(mu: float, tol: float = 1e-12) -> GeomBias:
    """Closed form mu log(1/mu)/(1-mu) - mu, plus a truncated-series oracle.

    The series sums mu (1-mu)^{n-1} / n until its geometric tail bound
    drops below tol, so the two values agree to tol by construction.
    """
    if not 0.0 < mu < 1.0:
        raise DomainError(f"mu must lie strictly inside (0,1), got {mu!r}")
    closed = mu * math.log(1.0 / mu) / (1.0 - mu) - mu
    acc = 0.0
    q = 1.0 - mu
    power = 1.0  # (1-mu)^{n-1}
    n = 1
    while power > tol * 0.01:
        acc += mu * power / n
        power *= q
        n += 1
    return GeomBias(closed_form=closed, series=acc - mu)


@dataclass(frozen=True)
class WaldResidual:
    """MC estimate of E[S_k - mu_k N_k] at the (truncated) stopping time."""

    arm: int
    residual: float
    std_err: float
    n: int


def wald_residual(records: list[RepRecord], k: int, mu: float) -> WaldResidual:
    """Residual of the stopped-sum identity E[S_k] = mu_k E[N_k].

    Every replication contributes N_k (mu_hat_k - mu_k); an arm never
    pulled contributes 0.  Censored replications enter at their truncated
    state (see the module docstring).
    """
    if len(records) < 2:
        raise NoDataError("need at least 2 replications")
    j = k - 1
    w = np.array([r.counts[j] * (r.means[j] - mu) if r.counts[j] >= 1 else 0.0 for r in records])
    return WaldResidual(arm=k, residual=float(w.mean()), std_err=float(w.std(ddof=1) / math.sqrt(len(w))), n=len(w))


@dataclass(frozen=True)
class CovCheck:
    """Both sides of bias = -Cov(mu_hat, N)/E[N] plus a combined error bar."""

    arm: int
    lhs: float
    rhs: float
    discrepancy: float
    combined_std_err: float
    n: int


def covariance_bias_check(records: list[RepRecord], k: int, mu: float) -> CovCheck:
    """Compare mean bias against the covariance form on the same runs.

    The combined standard error comes from the per-replication paired
    differences d_r = (mu_hat_r - mu) + c (mu_hat_r - m_mu)(N_r - m_N)/m_N
    with c = n/(n-1), whose average is exactly lhs - rhs.
    """
    j = k - 1
    x = np.array([r.means[j] for r in records if r.counts[j] >= 1])
    nv = np.array([r.counts[j] for r in records if r.counts[j] >= 1], dtype=np.float64)
    n = len(x)
    if n < 2:
        raise NoDataError(f"need at least 2 replications with observations of arm {k}")
    m_mu = float(x.mean())
    m_n = float(nv.mean())
    lhs = float(x.mean() - mu)
    if np.all(nv == nv[0]):
        cov = 0.0  # deterministic pull count: the covariance side vanishes
    else:
        cov = float(np.sum((x - m_mu) * (nv - m_n)) / (n - 1))
    rhs = -cov / m_n
    d = (x - mu) + (n / (n - 1)) * (x - m_mu) * (nv - m_n) / m_n
    return CovCheck(
        arm=k,
        lhs=lhs,
        rhs=rhs,
        discrepancy=lhs - rhs,
        combined_std_err=float(d.std(ddof=1) / math.sqrt(n)),
        n=n,
    )


@dataclass(frozen=True)
class ArmBias:
    arm: int
    mu: float
    bias: float | None
    std_err: float | None
    mean_count: float | None
    n_used: int


@dataclass(frozen=True)
class ConditionalBias:
    arm: int
    n: int
    bias: float | None
    std_err: float | None


@dataclass(frozen=True)
class ChosenBias:
    bias: float | None
    std_err: float | None
    n: int
    conditional: list[ConditionalBias] = field(default_factory=list)
    decomposition_gap: float | None = None


@dataclass(frozen=True)
class BiasReport:
    reps: int
    censored_reps: int
    per_arm: list[ArmBias]
    chosen: ChosenBias
    prop1: list[CovCheck]

    def to_jsonable(self) -> dict:
        return asdict(self)


def _mean_se(diffs: np.ndarray) -> tuple[float | None, float | None]:
    if len(diffs) == 0:
        return None, None
    bias = float(diffs.mean())
    se = float(diffs.std(ddof=1) / math.sqrt(len(diffs))) if len(diffs) >= 2 else None
    return bias, se


def aggregate_report(mus: tuple[float, ...], records: list[RepRecord]) -> BiasReport:
    """Full bias report over replications; see the module docstring for
    which subsets each block uses."""
    if not records:
        raise NoDataError("no replications")
    n_arms = len(mus)
    live = [r for r in records if not r.censored]
    censored_reps = len(records) - len(live)

    per_arm = []
    for k in range(1, n_arms + 1):
        j = k - 1
        diffs = np.array([r.means[j] - mus[j] for r in live if r.counts[j] >= 1])
        bias, se = _mean_se(diffs)
        counts = [r.counts[j] for r in live]
        per_arm.append(
            ArmBias(
                arm=k,
                mu=mus[j],
                bias=bias,
                std_err=se,
                mean_count=float(np.mean(counts)) if counts else None,
                n_used=len(diffs),
            )
        )

    chosen_diffs = np.array([r.means[r.chosen - 1] - mus[r.chosen - 1] for r in live if r.chosen is not None])
    c_bias, c_se = _mean_se(chosen_diffs)
    conditional = []
    gap = None
    if len(chosen_diffs) > 0:
        recomposed = 0.0
        for k in range(1, n_arms + 1):
            grp = np.array(
                [r.means[k - 1] - mus[k - 1] for r in live if r.chosen == k]
            )
            g_bias, g_se = _mean_se(grp)
            conditional.append(ConditionalBias(arm=k, n=len(grp), bias=g_bias, std_err=g_se))
            if len(grp) > 0:
                recomposed += g_bias * (len(grp) / len(chosen_diffs))
        gap = abs(recomposed - c_bias)

    prop1 = []
    for k in range(1, n_arms + 1):
        usable = sum(1 for r in records if r.counts[k - 1] >= 1)
        if usable >= 2:
            prop1.append(covariance_bias_check(records, k, mus[k - 1]))

    return BiasReport(
        reps=len(records),
        censored_reps=censored_reps,
        per_arm=per_arm,
        chosen=ChosenBias(bias=c_bias, std_err=c_se, n=len(chosen_diffs), conditional=conditional, decomposition_gap=gap),
        prop1=prop1,
    )


def mc_bias(
    strategy: StrategySpec,
    arms: tuple,
    reps: int,
    master_seed: int,
    cap: int = 100_000,
) -> BiasReport:
    """Monte Carlo bias report over independently seeded replications.

    Replication r runs against the table keyed by derive_rep_seed(seed, r),
    so the collection is reproducible and order-independent.
    """
    if reps < 1:
        raise DomainError(f"reps must be >= 1, got {reps}")
    mus = tuple(a.mu for a in arms)
    records = []
    for r in range(reps):
        rep_seed = derive_rep_seed(master_seed, r)
        table = CounterfactualTable(rep_seed, arms)
        trace = run_strategy(strategy, table, SeedStream(rep_seed), cap=cap, record=False)
        records.append(record_from_trace(trace))
    return aggregate_report(mus, records)
