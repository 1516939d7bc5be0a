"""Exception types shared across the package."""


class MetalakeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(MetalakeError, ValueError):
    """A caller-supplied value violates an operation's precondition."""


class NotFound(MetalakeError):
    """A referenced record, source, job, or schema does not exist."""


class IntegrityViolation(MetalakeError):
    """An edge references a vertex that is not stored."""


class Conflict(MetalakeError):
    """The operation collides with existing state (duplicate source, running job)."""


class ValidationFailed(MetalakeError):
    """A record failed validation; carries the full violation report."""

    def __init__(self, report):
        super().__init__("record failed validation: %s" % (report,))
        self.report = report


class ParseFailure(MetalakeError):
    """XML could not be parsed; carries the 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class FormatMismatch(MetalakeError):
    """Payload root namespace does not match the declared source format."""


class FilterSyntaxError(MetalakeError):
    """Filter expression failed to parse; carries the 0-based character position."""

    def __init__(self, message, position):
        super().__init__("%s (at position %d)" % (message, position))
        self.position = position


class TransportFailure(MetalakeError):
    """HTTP transport failed after retries, or returned a non-success status."""


class ProtocolFailure(MetalakeError):
    """The remote endpoint answered with a protocol-level error; carries the code."""

    def __init__(self, message, code=None):
        super().__init__(message)
        self.code = code
