"""Exception types shared across the package."""


class MBError(Exception):
    """Base class for library errors."""


class ValidationError(MBError, ValueError):
    """Malformed or inconsistent input."""


class SpanError(ValidationError):
    """A list of vectors does not span the required space."""


class NotAdjacentError(ValidationError):
    """Two topes are not separated by exactly one affine wall."""


class GenericityError(MBError):
    """A point is not generic enough for the requested construction.

    ``suggestion`` optionally carries a nearby point that passes the check.
    """

    def __init__(self, message, suggestion=None):
        super().__init__(message)
        self.suggestion = suggestion
