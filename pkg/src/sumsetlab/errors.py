"""Exception types shared across the package."""


class SumsetLabError(Exception):
    """Base class for every error raised by this package."""


class UsageError(SumsetLabError):
    """An interface contract was violated (mixed backends, bad arguments)."""


class DomainError(SumsetLabError):
    """Input lies outside an operation's mathematical domain."""


class UnsupportedOperationError(SumsetLabError):
    """The operation is not defined for this group backend."""


class ResourceLimitError(SumsetLabError):
    """A configured cap (ball radius, window size, enumeration count) was exceeded."""


class ParseError(SumsetLabError):
    """An element or set file failed to parse."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + where)
