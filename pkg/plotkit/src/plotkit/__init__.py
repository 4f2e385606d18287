"""Figures for banditlab raw CSV files: histograms of the sample-mean
deviation per arm, per chosen arm, or per scenario, with the group bias
marked as a vertical line.  Strictly read-only over the CSV contract."""

from .errors import DataError, PlotKitError, SchemaError
from .figures import FigureSpec, PanelStats, RenderResult, render_histograms
from .io import RawFile, Row, group_diffs, read_raw

__all__ = [
    "DataError",
    "PlotKitError",
    "SchemaError",
    "FigureSpec",
    "PanelStats",
    "RenderResult",
    "render_histograms",
    "RawFile",
    "Row",
    "group_diffs",
    "read_raw",
]
