"""Exception types shared across the package."""

from __future__ import annotations


class FockPathError(Exception):
    """Base class for all errors raised by fockpath."""


class GraphValidationError(FockPathError, ValueError):
    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = list(violations or [message])


class DanglingEndpoint(GraphValidationError):
    pass


class DuplicateId(GraphValidationError):
    pass


class NotComposable(FockPathError, ValueError):
    pass


class UnknownPath(FockPathError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class UpstreamUnchecked(FockPathError):
    """A structure reached the Fock layer without a verification certificate."""

    def __init__(self, message: str, reports: list | None = None):
        super().__init__(message)
        self.reports = list(reports or [])


class NotExact(FockPathError):
    """The structure has a cycle, so every finite Fock space is a truncation."""


class DimensionCap(FockPathError):
    pass


class ExpectationMismatch(FockPathError):
    def __init__(self, name: str, diff: list[dict]):
        fields = ", ".join(d["property"] for d in diff)
        super().__init__(f"fixture {name!r} differs from expectations in: {fields}")
        self.name = name
        self.diff = diff


class UnorientableRelation(UserWarning):
    """Both sides of a relation are the same word; the relation is dropped."""


class ParseError(FockPathError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class DSLSyntaxError(ParseError):
    pass


class UndeclaredId(ParseError):
    pass


class KindMismatch(ParseError):
    pass
