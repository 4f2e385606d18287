"""Histogram figures: the distribution of mean_hat - mu_true per group,
with a vertical line at the group's average (the bias estimate).

The abscissa of that line is the plain mean of the group's ``diff``
column in file order, which is exactly how the harness summary computes
the same bias, so the two agree to floating-point identity.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import SchemaError
from .io import group_diffs, read_raw

__all__ = ["FigureSpec", "PanelStats", "RenderResult", "render_histograms"]


@dataclass(frozen=True)
class FigureSpec:
    """One figure: which raw files, how to group, where to write."""

    raw_paths: tuple[str, ...]
    out_path: str
    group: str = "arm"
    bins: int = 40

    def __post_init__(self):
        if not self.raw_paths:
            raise SchemaError("raw_paths must name at least one file")
        if self.group not in ("arm", "chosen", "scenario"):
            raise SchemaError(f"unknown group {self.group!r}; expected arm, chosen or scenario")
        if self.bins < 10:
            raise SchemaError(f"bins must be >= 10, got {self.bins}")


@dataclass(frozen=True)
class PanelStats:
    label: str
    n: int
    bias: float
    std_err: float | None


@dataclass(frozen=True)
class RenderResult:
    path: str
    panels: list[PanelStats] = field(default_factory=list)


def _stats(label: str, values: list[float]) -> PanelStats:
    arr = np.array(values)
    bias = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) >= 2 else None
    return PanelStats(label=label, n=len(arr), bias=bias, std_err=se)


def _caption(stats: PanelStats) -> str:
    if stats.std_err is None:
        return f"bias {stats.bias:+.5g} (n={stats.n})"
    return f"bias {stats.bias:+.5g} ± {3 * stats.std_err:.3g} (3 SE, n={stats.n})"


def render_histograms(spec: FigureSpec) -> RenderResult:
    """Render one figure with one histogram panel per group and return
    the per-panel statistics along with the written path."""
    files = [read_raw(p) for p in spec.raw_paths]
    groups = group_diffs(files, spec.group)

    n = len(groups)
    ncols = min(3, n)
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.0 * ncols, 3.0 * nrows), squeeze=False, constrained_layout=True
    )

    panels = []
    for i, (label, values) in enumerate(groups.items()):
        stats = _stats(label, values)
        panels.append(stats)
        ax = axes[i // ncols][i % ncols]
        ax.hist(values, bins=spec.bins, color="#7a9cc6", edgecolor="white")
        ax.axvline(0.0, color="0.55", linewidth=0.9, linestyle=":")
        ax.axvline(stats.bias, color="crimson", linewidth=1.6)
        ax.set_title(label)
        ax.set_xlabel(_caption(stats))
    for i in range(n, nrows * ncols):
        axes[i // ncols][i % ncols].set_visible(False)

    scenarios = ", ".join(dict.fromkeys(rf.scenario for rf in files))
    fig.suptitle(f"{scenarios}: sample-mean deviation by {spec.group}")

    out_dir = os.path.dirname(spec.out_path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    fig.savefig(spec.out_path)
    plt.close(fig)
    return RenderResult(path=spec.out_path, panels=panels)
