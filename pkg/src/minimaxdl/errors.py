"""Exception hierarchy."""


class MinimaxDLError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(MinimaxDLError, ValueError):
    """A precondition on the inputs failed.

    ``condition`` names the violated condition, e.g. ``"p*(m-1) >= 50"``.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DimensionError(ParameterError):
    pass


class UnsupportedModelError(ParameterError):
    pass


class EnumerationCapError(ParameterError):
    pass


class ConstructionError(MinimaxDLError, RuntimeError):
    """A randomized construction did not succeed within its attempt budget."""

    def __init__(self, message, failure_prob_bound=None):
        super().__init__(message)
        self.failure_prob_bound = failure_prob_bound


class ConfigError(MinimaxDLError):
    """Invalid or incomplete experiment configuration (CLI exit code 2)."""
