"""Module to hold the exception hierarchy raised by the package"""


class DegrootError(Exception):
    """Root of every error raised on purpose by this package."""


class DomainError(DegrootError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class InvalidLambdaError(DomainError):
    pass


class InvalidTargetsError(DomainError):
    pass


class DimensionMismatchError(DomainError):
    pass


class EmptyVectorError(DomainError):
    pass


class RangeTooSmallError(DomainError):
    pass


class ConfigError(DomainError):
    pass


class StochasticityError(DomainError):
    """A matrix is not a valid row-stochastic interaction matrix."""


class NotSquareError(StochasticityError):
    pass


class NegativeEntryError(StochasticityError):
    pass


class RowSumViolationError(StochasticityError):
    pass


class NotStronglyConnectedError(DomainError):
    pass


class GenerationFailureError(DegrootError):
    pass


class NoConvergenceError(DegrootError):
    """An iterative computation ran out of iterations."""


class NotConvergedError(DegrootError):
    """A simulation trace did not reach consensus."""


class InsufficientDataError(DegrootError):
    pass


class OutputError(DegrootError):
    """Writing or reading an output file failed."""
