"""Exception hierarchy shared by every module of the package."""


class SchlichtError(Exception):
    """Base class for all errors raised by :mod:`schlicht`."""


class OrderMismatchError(SchlichtError, ValueError):
    pass


class NonInvertibleError(SchlichtError, ZeroDivisionError):
    pass


class DegenerateSeriesError(NonInvertibleError):
    """A quotient needed by a class oracle has a vanishing denominator."""


class DomainError(SchlichtError, ValueError):
    """Evaluation point outside the configured disk ceiling."""


class InvalidMeasureError(SchlichtError, ValueError):
    pass


class InvalidFunctionalError(SchlichtError, ValueError):
    pass


class NonconstantRequiredError(SchlichtError):
    """The functional's real part is constant on the extreme family."""
