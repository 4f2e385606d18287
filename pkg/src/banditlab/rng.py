"""Keyed, counter-based uniform random numbers.

Every random quantity in a run is a pure function of (master_seed, key...),
never of call order.  This is what makes single-cell perturbation replays
exact: overriding one table entry cannot shift any other random draw,
because nothing here has mutable stream state.

Key domains (first mixed word) keep the families disjoint:

    TABLE   - potential-outcome table cells, keyed by (row i, arm k)
    SEEDS   - per-round seeds, keyed by (t, slot)
    REP     - derivation of per-replication master seeds

Slot conventions inside the SEEDS domain:

    slot 0                  multinomial arm-selection seed for round t+1
                            (the uniform W_t)
    slot 1..K               per-arm auxiliary uniforms (e.g. posterior draws)
    slot CHOOSING_SLOT      single uniform consumed by a randomized
                            terminal choice
    slot >= _BB_BASE        composite (family, arm, index) slots used by
                            the Beta-Bernoulli sampler

The mixer is the splitmix64 finalizer applied as an absorb chain.  It is
implemented twice with identical arithmetic: once on Python ints (scalar)
and once on uint64 numpy arrays (block generation).  test_rng.py pins the
two paths to bit-identical outputs.
"""

from __future__ import annotations

import numpy as np

_M64 = (1 << 64) - 1
_GOLD = 0x9E3779B97F4A7C15
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB

# domain tags
TABLE = 0x7461626C65  # "table"
SEEDS = 0x73656564  # "seed"
REP = 0x726570  # "rep"

# slot layout inside the SEEDS domain, see module docstring
CHOOSING_SLOT = 1 << 20
_BB_BASE = 1 << 32


def _mix(x: int) -> int:
    x = (x + _GOLD) & _M64
    x = ((x ^ (x >> 30)) * _C1) & _M64
    x = ((x ^ (x >> 27)) * _C2) & _M64
    return x ^ (x >> 31)


def keyed_bits(seed: int, *words: int) -> int:
    """64 mixed bits, a pure function of (seed, words)."""
    h = _mix(seed & _M64)
    for w in words:
        h = _mix(h ^ (w & _M64))
    return h


def keyed_uniform(seed: int, *words: int) -> float:
    """A uniform in the open interval (0, 1), pure in (seed, words)."""
    return ((keyed_bits(seed, *words) >> 11) + 0.5) * 2.0**-53


def keyed_uniform_block(seed: int, words: tuple[int, ...], counters: np.ndarray) -> np.ndarray:
    """Vectorized keyed_uniform(seed, *words, c) for every c in counters.

    Bit-identical to the scalar path; the final absorbed word varies.
    """
    h = _mix(seed & _M64)
    for w in words:
        h = _mix(h ^ (w & _M64))
    z = np.uint64(h) ^ counters.astype(np.uint64)
    z = (z + np.uint64(_GOLD)) & np.uint64(_M64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_C1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_C2)
    z = z ^ (z >> np.uint64(31))
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def derive_rep_seed(master_seed: int, rep: int) -> int:
    """Master seed for replication `rep`, independent across reps."""
    return keyed_bits(master_seed, REP, rep)


class SeedStream:
    """Per-round keyed uniforms for one run (the W_t's and auxiliaries)."""

    __slots__ = ("seed",)

    def __init__(self, master_seed: int):
        self.seed = master_seed

    def uniform(self, t: int, slot: int = 0) -> float:
        """Uniform in (0,1) for round t, pure in (master_seed, t, slot)."""
        return keyed_uniform(self.seed, SEEDS, t, slot)

    def uniform_bb(self, t: int, family: int, arm: int, index: int) -> float:
        """Beta-Bernoulli budget uniform U/W_index for (round, arm).

        family 0 is the success budget, family 1 the failure budget.
        Composite slots stay clear of the small-integer slots; arm < 2^8
        and index < 2^24 by construction of the caller.
        """
        slot = _BB_BASE * (family + 1) + (arm << 24) + index
        return keyed_uniform(self.seed, SEEDS, t, slot)
