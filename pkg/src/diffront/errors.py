class ResourceCapError(RuntimeError):
    """A configured size cap (kernel time, particle count, grid area) was exceeded."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class BoundViolation(AssertionError):
    """A calibrated analytic bound was found violated by exact data."""


class FrontError(RuntimeError):
    """No separating interface could be extracted from a sample."""
