"""Exception types raised by cuspedkit."""

from typing import Optional


class GraphFormatError(ValueError):
    """Malformed graph, blowup or XW text input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SizeGuardError(ValueError):
    """An exhaustive scan or construction would exceed its configured limit."""


class LemmaViolation(RuntimeError):
    """A structural identity that must hold for every valid input did not.

    Raised by the decomposition, projection and cusped constructions when an
    internal consistency check fails. The CLI exits with status 3 on it.
    """
