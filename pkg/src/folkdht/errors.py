"""Exception types shared across the package."""


class FolkdhtError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(FolkdhtError):
    """Malformed input: empty names, bad config values, unparsable files."""


class UnknownResourceError(FolkdhtError):
    """An operation referenced a resource that was never inserted."""


class UnknownTagError(FolkdhtError):
    """A navigation start tag is not present in the source graphs."""


class DecodeError(FolkdhtError):
    """Stored blocks cannot be turned back into graphs."""


class InvariantViolation(FolkdhtError):
    """A cross-checked structural property failed.

    ``evidence`` carries the offending items (for example arc pairs), so
    callers can print an actionable diagnostic.
    """

    def __init__(self, message: str, evidence=None):
        super().__init__(message)
        self.evidence = list(evidence or [])
