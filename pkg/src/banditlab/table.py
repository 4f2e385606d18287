"""The pre-populated potential-outcome table.

Entry (i, k) is the reward revealed by the i-th pull of arm k.  Cells are
materialized lazily in blocks, but each cell's value is the pure function

    inverse_cdf(arms[k], keyed_uniform(master_seed, TABLE, i, k))

so the table behaves as if the whole infinite array existed up front.
`with_override` returns a view with one cell replaced, sharing the block
cache with its base; a replay against the override therefore touches the
exact same base values everywhere else.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .arms import Arm
from .errors import DomainError

_BLOCK = 1024


class _ColumnCache:
    """Lazily generated cell blocks, shared by a table and its overrides."""

    __slots__ = ("seed", "arms", "blocks")

    def __init__(self, seed: int, arms: tuple[Arm, ...]):
        self.seed = seed
        self.arms = arms
        self.blocks: list[list[np.ndarray | None]] = [[] for _ in arms]

    def value(self, i: int, k: int) -> float:
        # i, k are 1-based; block block_no covers rows block_no*_BLOCK+1 ..
        idx = i - 1
        block_no, off = divmod(idx, _BLOCK)
        col = self.blocks[k - 1]
        while len(col) <= block_no:
            col.append(None)
        arr = col[block_no]
        if arr is None:
            rows = np.arange(block_no * _BLOCK + 1, (block_no + 1) * _BLOCK + 1, dtype=np.uint64)
            u = rng.keyed_uniform_block(self.seed, (rng.TABLE, k), rows)
            arr = self.arms[k - 1].inverse_cdf_block(u)
            col[block_no] = arr
        return float(arr[off])


class CounterfactualTable:
    """Read-only view of the outcome table, possibly with overridden cells."""

    __slots__ = ("_cache", "_overrides")

    def __init__(self, master_seed: int, arms: tuple[Arm, ...] | list[Arm]):
        if len(arms) == 0:
            raise DomainError("need at least one arm")
        self._cache = _ColumnCache(master_seed, tuple(arms))
        self._overrides: dict[tuple[int, int], float] = {}

    @property
    def arms(self) -> tuple[Arm, ...]:
        return self._cache.arms

    @property
    def n_arms(self) -> int:
        return len(self._cache.arms)

    @property
    def master_seed(self) -> int:
        return self._cache.seed

    @property
    def overrides(self) -> dict[tuple[int, int], float]:
        return dict(self._overrides)

    def _check_key(self, i: int, k: int) -> None:
        if not 1 <= k <= self.n_arms:
            raise DomainError(f"arm index {k} outside 1..{self.n_arms}")
        if i < 1:
            raise DomainError(f"row index must be >= 1, got {i}")

    def cell(self, i: int, k: int) -> float:
        """Reward revealed by the i-th pull of arm k (both 1-based)."""
        self._check_key(i, k)
        if self._overrides:
            v = self._overrides.get((i, k))
            if v is not None:
                return v
        return self._cache.value(i, k)

    def with_override(self, i: int, k: int, value: float) -> "CounterfactualTable":
        """A new table equal to this one except that cell (i,k) = value.

        Overriding the same cell again wins over the previous override.
        The base table is left untouched and the block cache is shared.
        """
        self._check_key(i, k)
        t = object.__new__(CounterfactualTable)
        t._cache = self._cache
        t._overrides = {**self._overrides, (i, k): float(value)}
        return t
