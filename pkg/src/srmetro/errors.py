"""Exception hierarchy shared by every srmetro module."""


class MetrologyError(Exception):
    """Base class for all srmetro errors."""


class InvalidInputError(MetrologyError, ValueError):
    """An argument violates an operation's precondition."""


class InvalidStateError(MetrologyError, RuntimeError):
    """An object lacks something the operation needs (e.g. velocities)."""


class DegenerateVisibilityError(InvalidInputError):
    """The linearised visibility 1 - N dS^2 / 2 is not positive."""


class FitDegeneracyError(MetrologyError):
    """Too few points or too short a span to fit a fringe."""


class NoFringeError(MetrologyError):
    """Zero visibility: no slope to convert noise into a sensitivity."""


class OracleScaleError(InvalidInputError):
    """The brute-force oracle was asked for a system above its size cap."""
