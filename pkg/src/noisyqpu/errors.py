"""Exception hierarchy shared by all subpackages.

The CLI maps :class:`ValidationError` to exit code 2 and
:class:`NumericalError` to exit code 3.
"""


class NoisyQPUError(Exception):
    """Base class for all package errors."""


class ValidationError(NoisyQPUError, ValueError):
    """Input violates a documented precondition."""


class NumericalError(NoisyQPUError, ArithmeticError):
    """A numerical routine failed or lost accuracy."""


# qcore
class UnknownDecomposition(ValidationError):
    pass


class DisconnectedTopology(ValidationError):
    pass


class MissingDuration(ValidationError):
    pass


# noise
class InvalidParameter(ValidationError):
    pass


class MissingCalibration(ValidationError):
    pass


# densim / metrics
class RegisterTooLarge(ValidationError):
    pass


class NumericalBreakdown(NumericalError):
    pass


class InvalidTriplet(ValidationError):
    pass


class DegenerateSpectrum(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class NonConvergence(NumericalError):
    pass


class DenominatorNonpositive(ValidationError):
    pass
