"""
Exceptions and warning categories raised across towlab.

Precondition violations are plain ``ValueError``s. Numerical trouble that still yields
a usable (if doubtful) result is reported with a warning so callers can filter it.
"""


class ConfigError(ValueError):
    """A run configuration holds a value outside its admissible range."""


class StrategyError(RuntimeError):
    """A strategy moved the token outside the open epsilon ball of its position."""


class ConvergenceWarning(UserWarning):
    """An iterative solve stopped at max_sweeps before meeting its tolerance."""


class ReliabilityWarning(UserWarning):
    """A statistical or extrapolated result should not be trusted as is."""
