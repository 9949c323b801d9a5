"""Exception hierarchy shared by all ringcert modules."""


class RingCertError(Exception):
    """Base class for all errors raised by ringcert."""


class DimensionError(RingCertError, ValueError):
    """Operand shapes or subsystem dimensions are inconsistent."""


class DomainError(RingCertError, ValueError):
    """A scalar argument lies outside the domain of the function."""


class ValidationError(RingCertError, ValueError):
    """A structured object fails one or more of its invariants.

    ``failures`` lists a short description of every failed check.
    """

    def __init__(self, message, failures=()):
        self.failures = list(failures)
        if self.failures:
            message = message + ": " + "; ".join(self.failures)
        super().__init__(message)


class PreconditionError(RingCertError, ValueError):
    """An operation's precondition does not hold for the given input."""


class ConsistencyError(RingCertError, ArithmeticError):
    """Quantities that must agree numerically do not."""


class CapacityError(RingCertError, ValueError):
    """The input is too large for an exhaustive search."""
