"""Exception hierarchy shared by every qgm module."""


class QGMError(Exception):
    """Base class for all errors raised by qgm."""

    exit_code = 1


class ValidationError(QGMError, ValueError):
    """Malformed input: bad dimensions, out-of-range vertices, wrong shapes."""

    exit_code = 2


class DomainError(ValidationError):
    """A scalar function was applied outside its domain (e.g. log of a negative eigenvalue)."""


class CapacityError(QGMError):
    """Requested Hilbert space or joint table exceeds the configured size cap."""

    exit_code = 3


class NumericalError(QGMError, ArithmeticError):
    """An iterative routine failed to converge."""

    exit_code = 4
