"""Exception types raised by krigreg."""


class KrigregError(Exception):
    """Base class for all krigreg errors."""


class UsageError(KrigregError, ValueError):
    """Invalid arguments: wrong dimension, bad policy, malformed input."""


class ConditioningError(KrigregError, ArithmeticError):
    """A matrix is too ill-conditioned for the requested operation."""


class NumericalError(KrigregError, ArithmeticError):
    """A numerical routine failed (eigen-solver, optimizer)."""
