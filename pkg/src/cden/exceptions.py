"""Exception hierarchy.

Everything raised on bad data derives from :class:`CdenError`, so callers
(the CLI in particular) can catch a single type.
"""


class CdenError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CdenError, ValueError):
    pass


class DecodeError(CdenError):
    """Raised when image bytes cannot be decoded."""


class EmptyBinError(InvalidInputError):
    """Raised when a per-bin quantity is requested for a bin with no pixels."""


class EmptyCorpusError(InvalidInputError):
    pass


class IncompatibleMetricError(InvalidInputError):
    """Raised when a metric is used with descriptors of the wrong kind."""


class IndexFormatError(CdenError):
    """The index file is not in the expected format."""


class IndexVersionError(IndexFormatError):
    pass


class IndexKindError(IndexFormatError):
    pass


class MalformedRecordError(IndexFormatError):
    def __init__(self, lineno, reason):
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}")
