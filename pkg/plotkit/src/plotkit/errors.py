"""Deliberate failure types for the figure tool."""


class PlotKitError(Exception):
    """Base class for all deliberate failures."""


class SchemaError(PlotKitError, ValueError):
    """An input file does not conform to the raw CSV contract."""


class DataError(PlotKitError):
    """The rows are well-formed but cannot support the requested figure
    (e.g. a group is empty after filtering)."""
