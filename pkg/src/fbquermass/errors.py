"""Exception types raised by the geometry, flow and harness layers."""


class GeometryError(ValueError):
    """Base class for invalid or degenerate geometric input."""


class NotStrictlyConvex(GeometryError):
    pass


class DegenerateProfile(GeometryError):
    pass


class DomainError(GeometryError):
    pass


class GenerationFailed(RuntimeError):
    pass


class OutOfRange(ValueError):
    pass


class HemisphereViolation(GeometryError):
    pass


class MonotonicityViolation(RuntimeError):
    pass


class StepTooLarge(RuntimeError):
    """Raised by a single flow step whose update exceeds the allowed size."""
