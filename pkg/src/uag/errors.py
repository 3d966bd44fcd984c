"""Exception hierarchy shared by every module."""

from __future__ import annotations


class UagError(Exception):
    """Base class for all engine errors."""


class ParseError(UagError):
    def __init__(self, message: str, line: int, column: int, expected: str | None = None):
        self.line = line
        self.column = column
        self.expected = expected
        text = f"{line}:{column}: {message}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class ValidationError(UagError):
    """A problem that parses but violates a declared invariant."""


class ArityError(ValidationError):
    pass


class UndeclaredError(ValidationError):
    pass


class SignatureMismatch(UagError):
    pass


class BoundExceeded(UagError):
    """A search or enumeration would exceed its configured state bound."""


class UncertifiedTruncation(UagError):
    pass


class NotAlgebraic(UagError):
    """The point set handed to a geometry operation is not Zariski-closed."""


class OutsideFragment(UagError):
    """The input lies outside the decidable symbolic fragment."""


class ConsistencyError(UagError):
    """Two independently computed verdicts disagree. Always an engine bug."""
