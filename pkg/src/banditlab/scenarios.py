"""Scenario configs: arms plus a strategy plus a replication plan.

A scenario is described by a plain JSON document so runs can be scripted,
diffed, and archived next to their outputs.  The parser is strict on
purpose: unknown keys are rejected with their dotted path, required keys
must be present, and every value is type-checked before anything random
happens.  ``builtin_scenarios`` ships a catalog of ready-made documents
covering the experiments this package exists to reproduce; each one goes
through the same parser as user configs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .arms import Bernoulli, BoundedUniform, Gaussian
from .choosing import ArgmaxCount, ArgmaxLastObservation, ArgmaxMean, FixedArm, RankProbability
from .engine import StrategySpec
from .errors import DomainError, SchemaError
from .sampling import (
    EpsGreedy,
    Greedy,
    LilUCB,
    MinMeanGreedy,
    RoundRobin,
    ThompsonBetaBernoulli,
    ThompsonGaussian,
    UCB,
    UniformRandom,
)
from .stopping import (
    FirstSuccess,
    FixedHorizon,
    GapStop,
    LilUCBCount,
    LineCrossing,
    MeanBoundary,
    SLRT,
)

__all__ = [
    "ScenarioConfig",
    "parse_config",
    "load_config",
    "builtin_names",
    "builtin",
    "builtin_scenarios",
]


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully validated experiment: what to run and how many times."""

    name: str
    arms: tuple
    strategy: StrategySpec
    reps: int = 10_000
    master_seed: int = 1
    cap: int = 100_000


# ---------------------------------------------------------------------------
# value coercion

def _as_bool(path: str, v) -> bool:
    if not isinstance(v, bool):
        raise SchemaError(path, f"expected a boolean, got {v!r}")
    return v


def _as_int(path: str, v, minimum: int | None = None) -> int:
    # bool is an int subclass; configs must say what they mean
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(path, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise SchemaError(path, f"must be >= {minimum}, got {v}")
    return v


def _as_pos_int(path: str, v) -> int:
    return _as_int(path, v, minimum=1)


def _as_real(path: str, v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(path, f"expected a number, got {v!r}")
    return float(v)


def _as_str(path: str, v) -> str:
    if not isinstance(v, str):
        raise SchemaError(path, f"expected a string, got {v!r}")
    return v


def _as_real_list(path: str, v) -> tuple[float, ...]:
    if not isinstance(v, list):
        raise SchemaError(path, f"expected a list of numbers, got {v!r}")
    return tuple(_as_real(f"{path}[{i}]", x) for i, x in enumerate(v))


# ---------------------------------------------------------------------------
# rule and arm tables: discriminator key -> (class, parameter converters,
# required parameter names)

_SAMPLING = {
    "round-robin": (RoundRobin, {}, ()),
    "uniform-random": (UniformRandom, {}, ()),
    "greedy": (Greedy, {"warmup": _as_bool}, ()),
    "min-mean-greedy": (MinMeanGreedy, {"warmup": _as_bool}, ()),
    "eps-greedy": (EpsGreedy, {"eps": _as_real, "warmup": _as_bool}, ("eps",)),
    "ucb": (UCB, {"delta": _as_real, "warmup": _as_bool}, ("delta",)),
    "lil-ucb": (
        LilUCB,
        {"eps": _as_real, "beta": _as_real, "delta": _as_real, "sigma": _as_real, "warmup": _as_bool},
        (),
    ),
    "thompson-gaussian": (
        ThompsonGaussian,
        {"prior_mean": _as_real, "prior_sd": _as_real, "sd": _as_real, "warmup": _as_bool},
        (),
    ),
    "thompson-beta-bernoulli": (
        ThompsonBetaBernoulli,
        {"n0": _as_pos_int, "m0": _as_pos_int, "warmup": _as_bool},
        (),
    ),
}

_STOPPING = {
    "fixed-horizon": (FixedHorizon, {"horizon": _as_pos_int}, ("horizon",)),
    "first-success": (FirstSuccess, {"arm": _as_pos_int, "target": _as_real}, ("arm",)),
    "mean-boundary": (MeanBoundary, {"arm": _as_pos_int, "boundary": _as_real}, ("arm", "boundary")),
    "line-crossing": (
        LineCrossing,
        {"arm": _as_pos_int, "slope": _as_real, "intercept": _as_real},
        ("arm", "slope", "intercept"),
    ),
    "slrt": (
        SLRT,
        {"w": _as_real, "alpha": _as_real, "sigma": _as_real, "max_time": _as_pos_int},
        (),
    ),
    "lil-ucb-count": (LilUCBCount, {"lam": _as_real}, ()),
    "gap-stop": (GapStop, {"gap": _as_real, "max_cycles": _as_pos_int}, ("gap", "max_cycles")),
}

_CHOOSING = {
    "fixed-arm": (FixedArm, {"arm": _as_pos_int}, ("arm",)),
    "argmax-mean": (ArgmaxMean, {}, ()),
    "argmax-count": (ArgmaxCount, {}, ()),
    "argmax-last": (ArgmaxLastObservation, {}, ()),
    "rank-probability": (RankProbability, {"probs": _as_real_list}, ("probs",)),
}

_ARMS = {
    "gaussian": (Gaussian, {"mean": _as_real, "sd": _as_real}, ("mean", "sd")),
    "bernoulli": (Bernoulli, {"p": _as_real}, ("p",)),
    "uniform": (BoundedUniform, {"lo": _as_real, "hi": _as_real}, ("lo", "hi")),
}


def _build(path: str, spec, table, discriminator: str):
    if not isinstance(spec, dict):
        raise SchemaError(path, f"expected an object, got {spec!r}")
    if discriminator not in spec:
        raise SchemaError(f"{path}.{discriminator}", "missing key")
    kind = _as_str(f"{path}.{discriminator}", spec[discriminator])
    if kind not in table:
        known = ", ".join(sorted(table))
        raise SchemaError(f"{path}.{discriminator}", f"unknown value {kind!r}; known: {known}")
    cls, converters, required = table[kind]
    kwargs = {}
    for key, value in spec.items():
        if key == discriminator:
            continue
        if key not in converters:
            raise SchemaError(f"{path}.{key}", f"unknown key for {discriminator} {kind!r}")
        kwargs[key] = converters[key](f"{path}.{key}", value)
    for key in required:
        if key not in kwargs:
            raise SchemaError(path, f"{discriminator} {kind!r} requires key {key!r}")
    try:
        return cls(**kwargs)
    except DomainError as e:
        raise SchemaError(path, str(e)) from e


_TOP_KEYS = ("name", "arms", "sampling", "stopping", "choosing", "reps", "master_seed", "cap")


def parse_config(doc) -> ScenarioConfig:
    """Validate a JSON document and build the scenario it describes.

    Raises SchemaError naming the offending field by dotted path.
    """
    if not isinstance(doc, dict):
        raise SchemaError("<config>", f"expected a JSON object, got {doc!r}")
    for key in doc:
        if key not in _TOP_KEYS:
            raise SchemaError(str(key), "unknown key")
    for key in ("name", "arms", "sampling", "stopping", "choosing"):
        if key not in doc:
            raise SchemaError(key, "missing key")

    name = _as_str("name", doc["name"])
    if not name:
        raise SchemaError("name", "must be non-empty")

    if not isinstance(doc["arms"], list) or not doc["arms"]:
        raise SchemaError("arms", "expected a non-empty list of arm objects")
    arms = tuple(
        _build(f"arms[{i}]", spec, _ARMS, "family") for i, spec in enumerate(doc["arms"])
    )
    n_arms = len(arms)

    sampling = _build("sampling", doc["sampling"], _SAMPLING, "rule")
    stopping = _build("stopping", doc["stopping"], _STOPPING, "rule")
    choosing = _build("choosing", doc["choosing"], _CHOOSING, "rule")

    # cross-field checks that need the arm count
    for section, rule in (("stopping", stopping), ("choosing", choosing)):
        arm_ref = getattr(rule, "arm", None)
        if arm_ref is not None and arm_ref > n_arms:
            raise SchemaError(
                f"{section}.arm", f"references arm {arm_ref}, but the scenario has {n_arms} arms"
            )
    if isinstance(stopping, (SLRT, GapStop)) and n_arms < 2:
        raise SchemaError("stopping", "this rule compares arms and needs at least 2 of them")
    if isinstance(choosing, RankProbability) and len(choosing.probs) != n_arms:
        raise SchemaError(
            "choosing.probs", f"needs one probability per arm, got {len(choosing.probs)} for {n_arms} arms"
        )
    if isinstance(sampling, ThompsonBetaBernoulli) and not all(
        isinstance(a, Bernoulli) for a in arms
    ):
        raise SchemaError("sampling", "thompson-beta-bernoulli requires bernoulli arms")

    reps = _as_int("reps", doc.get("reps", 10_000), minimum=1)
    master_seed = _as_int("master_seed", doc.get("master_seed", 1), minimum=0)
    cap = _as_int("cap", doc.get("cap", 100_000), minimum=1)

    return ScenarioConfig(
        name=name,
        arms=arms,
        strategy=StrategySpec(sampling=sampling, stopping=stopping, choosing=choosing),
        reps=reps,
        master_seed=master_seed,
        cap=cap,
    )


def load_config(path: str) -> ScenarioConfig:
    """Read and validate a JSON config file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(str(path), f"invalid JSON: {e}") from e
    return parse_config(doc)


# ---------------------------------------------------------------------------
# builtin catalog

def _gaussians(*means: float, sd: float = 1.0) -> list[dict]:
    return [{"family": "gaussian", "mean": m, "sd": sd} for m in means]


def _fixed_t_doc(name: str, sampling: dict) -> dict:
    # three unit-variance arms sampled to a fixed horizon; per-arm bias
    # is the quantity of interest, so the final choice is pinned to arm 1
    return {
        "name": name,
        "arms": _gaussians(1.0, 2.0, 3.0),
        "sampling": sampling,
        "stopping": {"rule": "fixed-horizon", "horizon": 200},
        "choosing": {"rule": "fixed-arm", "arm": 1},
        "reps": 10_000,
        "master_seed": 1,
        "cap": 100_000,
    }


def _slrt_doc(name: str, mu1: float) -> dict:
    return {
        "name": name,
        "arms": _gaussians(mu1, 0.0),
        "sampling": {"rule": "round-robin"},
        "stopping": {"rule": "slrt", "w": 10.0, "alpha": 0.1, "sigma": 1.0, "max_time": 200},
        "choosing": {"rule": "fixed-arm", "arm": 1},
        "reps": 10_000,
        "master_seed": 1,
        "cap": 100_000,
    }


def _lilucb_doc(gap: float) -> dict:
    return {
        "name": f"lilucb-gap-{gap:g}",
        "arms": _gaussians(gap, 0.0, -gap),
        "sampling": {"rule": "lil-ucb", "eps": 0.01, "beta": 1.0, "delta": 0.005, "sigma": 1.0},
        "stopping": {"rule": "lil-ucb-count", "lam": 9.0},
        "choosing": {"rule": "argmax-count"},
        "reps": 10_000,
        "master_seed": 1,
        "cap": 100_000,
    }


def _gapstop_doc(gap: float) -> dict:
    return {
        "name": f"gapstop-gap-{gap:g}",
        "arms": _gaussians(gap, 0.0, -gap),
        "sampling": {"rule": "round-robin"},
        "stopping": {"rule": "gap-stop", "gap": 0.7 * gap, "max_cycles": 1000},
        "choosing": {"rule": "argmax-mean"},
        "reps": 10_000,
        "master_seed": 1,
        "cap": 100_000,
    }


def _builtin_docs() -> list[dict]:
    docs = [
        _fixed_t_doc("greedy-fixed-T", {"rule": "greedy"}),
        _fixed_t_doc("ucb-fixed-T", {"rule": "ucb", "delta": 0.1}),
        _fixed_t_doc(
            "thompson-fixed-T",
            {"rule": "thompson-gaussian", "prior_mean": 0.0, "prior_sd": 1.0, "sd": 1.0},
        ),
        _slrt_doc("slrt-null", 0.0),
        _slrt_doc("slrt-alt", 1.0),
        _lilucb_doc(1.0),
        _lilucb_doc(3.0),
        _lilucb_doc(5.0),
        _gapstop_doc(1.0),
        _gapstop_doc(3.0),
        _gapstop_doc(5.0),
        {
            "name": "example1-geometric",
            "arms": [{"family": "bernoulli", "p": 0.5}, {"family": "bernoulli", "p": 0.5}],
            "sampling": {"rule": "round-robin"},
            "stopping": {"rule": "first-success", "arm": 1, "target": 1.0},
            "choosing": {"rule": "fixed-arm", "arm": 1},
            "reps": 10_000,
            "master_seed": 1,
            "cap": 100_000,
        },
        {
            "name": "example2-line-b5",
            "arms": _gaussians(1.0),
            "sampling": {"rule": "round-robin"},
            "stopping": {"rule": "line-crossing", "arm": 1, "slope": 1.0, "intercept": 5.0},
            "choosing": {"rule": "fixed-arm", "arm": 1},
            "reps": 10_000,
            "master_seed": 1,
            "cap": 100_000,
        },
        {
            "name": "example2-line-b10",
            "arms": _gaussians(1.0),
            "sampling": {"rule": "round-robin"},
            "stopping": {"rule": "line-crossing", "arm": 1, "slope": 1.0, "intercept": 10.0},
            "choosing": {"rule": "fixed-arm", "arm": 1},
            "reps": 10_000,
            "master_seed": 1,
            "cap": 100_000,
        },
        {
            "name": "example4-argmax",
            "arms": _gaussians(0.0, 0.0),
            "sampling": {"rule": "round-robin"},
            "stopping": {"rule": "fixed-horizon", "horizon": 2},
            "choosing": {"rule": "argmax-last"},
            "reps": 10_000,
            "master_seed": 1,
            "cap": 100_000,
        },
        {
            "name": "example4-k10",
            "arms": _gaussians(*([0.0] * 10)),
            "sampling": {"rule": "round-robin"},
            "stopping": {"rule": "fixed-horizon", "horizon": 10},
            "choosing": {"rule": "argmax-last"},
            "reps": 10_000,
            "master_seed": 1,
            "cap": 100_000,
        },
    ]
    return docs


def builtin_names() -> tuple[str, ...]:
    return tuple(doc["name"] for doc in _builtin_docs())


def builtin_scenarios() -> tuple[ScenarioConfig, ...]:
    """Every builtin document, run through the same parser as user configs."""
    return tuple(parse_config(doc) for doc in _builtin_docs())


def builtin(name: str) -> ScenarioConfig:
    for doc in _builtin_docs():
        if doc["name"] == name:
            return parse_config(doc)
    known = ", ".join(builtin_names())
    raise DomainError(f"unknown builtin scenario {name!r}; known: {known}")
