"""Exception types raised across the toolkit."""


class FcpeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FcpeError, ValueError):
    """A numeric argument lies outside the mathematical domain of an operation."""


class ShapeError(FcpeError, ValueError):
    """Array arguments have incompatible or malformed shapes."""


class PitchRangeError(FcpeError, ValueError):
    """A frequency falls outside the range representable on the pitch grid."""


class ConfigError(FcpeError, ValueError):
    """Inconsistent configuration objects (e.g. sample-rate mismatch)."""


class FormatError(FcpeError, ValueError):
    """A file does not conform to its declared on-disk format."""


class ParseError(FormatError):
    """A text label file failed to parse; carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class TruncatedFileError(FcpeError, IOError):
    """A binary file ended before its declared payload."""


class ArchiveError(FcpeError, ValueError):
    """A weight archive is missing tensors or carries wrong shapes."""


class DegenerateInputError(FcpeError, ValueError):
    """An input is technically valid but makes the operation meaningless."""


class MetricUndefinedError(FcpeError, ValueError):
    """A metric has an empty support (e.g. no voiced reference frames)."""


class DivergenceError(FcpeError, RuntimeError):
    """Training produced a non-finite loss."""

    def __init__(self, message: str, epoch: int | None = None):
        self.epoch = epoch
        super().__init__(message)
