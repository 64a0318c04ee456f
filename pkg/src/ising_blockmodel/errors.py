class DomainError(ValueError):
    """Input outside the domain of an operation."""


class BoundaryError(DomainError):
    """Parameters sit on the critical line beta + |alpha| = 2."""


class ResourceError(RuntimeError):
    """Requested problem size exceeds what the exact routines support."""
