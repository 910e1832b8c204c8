"""Exception hierarchy shared by every module."""


class MilieError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpanError(MilieError, ValueError):
    pass


class OverlapError(MilieError, ValueError):
    pass


class LengthError(MilieError, ValueError):
    pass


class AlignmentError(MilieError, ValueError):
    pass


class ModelError(MilieError):
    pass


class FormatError(MilieError):
    """Malformed input file or model container.

    ``line`` is the 1-based line number when the error came from a JSONL file.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(MilieError, ValueError):
    pass


class DataError(MilieError, ValueError):
    pass


class MixedSentenceError(MilieError, ValueError):
    pass


class MissingTagError(MilieError, KeyError):
    pass
