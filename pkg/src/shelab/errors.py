"""Exception hierarchy shared by every module."""


class SheLabError(Exception):
    pass


class CflViolation(SheLabError, ValueError):
    """Explicit time step exceeds dx**2 / 2."""


class BadDomain(SheLabError, ValueError):
    pass


class NegativeInput(SheLabError, ValueError):
    pass


class ShapeMismatch(SheLabError, ValueError):
    pass


class OutOfDomain(SheLabError, ValueError):
    pass


class BadTime(SheLabError, ValueError):
    pass


class BadRange(SheLabError, ValueError):
    pass


class InsufficientPaths(SheLabError, RuntimeError):
    """Standard error too large for the requested tolerance."""


class DegenerateEstimate(SheLabError, RuntimeError):
    pass


class ConfigError(SheLabError, ValueError):
    """Invalid configuration file; ``where`` names the line/field."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)
