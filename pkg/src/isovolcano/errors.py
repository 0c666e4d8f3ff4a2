"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes (2, 3, 4).
"""


class VolcanoError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgument(VolcanoError, ValueError):
    """Caller supplied input outside an operation's domain."""


class ResourceError(VolcanoError, RuntimeError):
    """A configured search or size cap was exceeded."""


class InternalError(VolcanoError, RuntimeError):
    """An internal consistency check failed."""


class SupersingularError(InvalidArgument):
    """Navigation was attempted from a (suspected) supersingular vertex."""


class AmbiguityError(VolcanoError, RuntimeError):
    """A step that should have a unique answer had several (or none)."""


class FormatError(InvalidArgument):
    """A file did not conform to its documented format."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
