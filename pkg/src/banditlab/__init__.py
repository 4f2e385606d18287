"""Deterministic bandit simulations for studying the sign of the
sample-mean bias under adaptive sampling, stopping and choosing.

The package splits into three layers:

- the engine: counterfactual reward tables, keyed randomness, and the
  single-run protocol (``run_strategy``);
- estimators and scenarios: Monte Carlo bias reports, martingale and
  covariance identity checks, and a catalog of ready-made experiments
  driven through the CSV/JSON harness;
- the certification lab: counterfactual perturbation sweeps that test
  the monotonicity properties the bias-sign results rest on.
"""

from .arms import Bernoulli, BoundedUniform, Gaussian
from .engine import StrategySpec, Trace, run_strategy
from .errors import (
    BanditLabError,
    ConsistencyError,
    DomainError,
    NoDataError,
    SchemaError,
    UndefinedMeanError,
)
from .estimators import aggregate_report, mc_bias
from .harness import RunResult, run_scenario, summarize_file
from .lab import RULE_SETS, certify_rule_set, monotonicity_verdict, quantile_grid
from .rng import SeedStream, derive_rep_seed
from .scenarios import ScenarioConfig, builtin, builtin_names, builtin_scenarios, load_config, parse_config
from .table import CounterfactualTable

__all__ = [
    "Bernoulli",
    "BoundedUniform",
    "Gaussian",
    "StrategySpec",
    "Trace",
    "run_strategy",
    "BanditLabError",
    "ConsistencyError",
    "DomainError",
    "NoDataError",
    "SchemaError",
    "UndefinedMeanError",
    "aggregate_report",
    "mc_bias",
    "RunResult",
    "run_scenario",
    "summarize_file",
    "RULE_SETS",
    "certify_rule_set",
    "monotonicity_verdict",
    "quantile_grid",
    "SeedStream",
    "derive_rep_seed",
    "ScenarioConfig",
    "builtin",
    "builtin_names",
    "builtin_scenarios",
    "load_config",
    "parse_config",
    "CounterfactualTable",
]
