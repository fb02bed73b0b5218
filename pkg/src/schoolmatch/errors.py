"""Exceptions shared across the package."""


class SchoolMatchError(Exception):
    pass


class InstanceTooLargeError(SchoolMatchError):
    """Raised when a brute-force routine is asked to exceed its size bound."""


class CycleLimitExceededError(SchoolMatchError):
    """Cycle enumeration hit its count limit; partial results are attached."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class SearchLimitExceededError(SchoolMatchError):
    """Matching-space search hit its limit; partial results are attached."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class PreconditionError(SchoolMatchError):
    """A check was invoked on inputs that do not satisfy its precondition."""


class ParseError(SchoolMatchError):
    """Instance or matching text could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
