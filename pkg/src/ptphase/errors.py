"""Exception types shared across the package."""


class PtphaseError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PtphaseError):
    """An argument is outside its documented domain."""


class CapabilityError(PtphaseError):
    """The request exceeds a hard size/order limit of the implementation."""


class SingularInputError(PtphaseError):
    """A ratio with a vanishing denominator was requested."""


class UnsupportedLayoutError(PtphaseError):
    """A subsystem layout outside the supported (contiguous) conventions."""


class NumericError(PtphaseError):
    """A numerical routine failed (diagnostics in the message)."""
