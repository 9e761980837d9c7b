"""Exception hierarchy."""


class PonceletError(Exception):
    """Base class for every numerical or geometric failure in the package."""


class KernelError(PonceletError, ArithmeticError):
    """A one-dimensional root solve inside the stepping kernel failed."""


class InvalidOval(PonceletError, ValueError):
    pass


class InvalidPair(PonceletError, ValueError):
    """The inner oval is not strictly inside the outer one."""


class PointInsideOval(PonceletError, ValueError):
    pass


class TangencySolveFailed(PonceletError):
    pass


class NoExitFound(PonceletError):
    pass


class DomainViolation(PonceletError, ValueError):
    pass


class NegativeDiscriminant(PonceletError, ValueError):
    pass


class ZeroDenominator(PonceletError, ZeroDivisionError):
    pass


class ParallelTangents(PonceletError):
    """Consecutive tangent lines do not meet in a point."""


class NoConvergence(PonceletError):
    pass


class EventMissed(PonceletError):
    """The flow left its level curve before the requested event fired."""


class ConfigError(ValueError):
    """Malformed run configuration (not a numerical failure)."""
