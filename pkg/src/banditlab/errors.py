"""Exception hierarchy shared across the package.

Every error raised on purpose derives from BanditLabError so callers can
catch domain failures without swallowing programming mistakes.
"""


class BanditLabError(Exception):
    """Base class for all deliberate failures."""


class DomainError(BanditLabError, ValueError):
    """A parameter or argument is outside its mathematical domain."""


class SchemaError(BanditLabError, ValueError):
    """A config document failed validation.

    The message always names the offending field by dotted path so the
    CLI can point at the exact key.
    """

    def __init__(self, path: str, problem: str):
        self.path = path
        self.problem = problem
        super().__init__(f"{path}: {problem}")


class ConsistencyError(BanditLabError):
    """An internal invariant was violated (e.g. probabilities not summing to 1)."""


class UndefinedMeanError(BanditLabError):
    """A sample mean was requested for an arm with no observations."""


class NoDataError(BanditLabError):
    """An estimator was invoked on an empty or fully censored collection."""
