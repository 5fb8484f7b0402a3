"""Exception types shared across the package.

The CLI maps these onto exit codes, so library code should raise the most
specific class that applies rather than a bare ValueError when the problem
comes from user-supplied text or bindings.
"""

from __future__ import annotations


class FuzzchainError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(FuzzchainError):
    """Syntax or structural error in expression, system, or assignment text."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class BindingError(FuzzchainError):
    """A variable (or atom) has no usable numeric binding."""


class UnknownSystemError(FuzzchainError):
    """A call names a system that is not present in the registry."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown system: {name!r}")
