"""Shared exception types."""


class KinmorphError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(KinmorphError):
    """A text resource (inventory, rule file, labels, ...) is malformed.

    Carries the offending location when known.
    """

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc += f" (line {line}"
            loc += f", column {column})" if column is not None else ")"
        elif column is not None:
            loc += f" (column {column})"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ValidationError(KinmorphError):
    """A well-formed value violates a domain invariant."""
