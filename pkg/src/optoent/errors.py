"""Exception hierarchy shared by all modules."""


class OptoentError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(OptoentError, ValueError):
    """A physical parameter or argument is outside its allowed range."""


class DomainError(OptoentError, ValueError):
    """A formula is evaluated outside the regime where it is defined."""


class NumericalError(OptoentError, ArithmeticError):
    """A numerical routine failed or produced an unphysical result."""


class UnstableSystemError(OptoentError):
    """The drift matrix has no stationary state."""


class ResourceError(OptoentError):
    """A requested computation exceeds the configured work budget."""
