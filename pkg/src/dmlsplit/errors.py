"""Exception hierarchy shared by the library and the CLI.

Each class carries the CLI exit code it maps to.
"""

from __future__ import annotations


class DmlError(Exception):
    exit_code = 1
    code = "error"

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "location": self.location}


class DomainError(DmlError, ValueError):
    """Mathematically invalid input: zero where nonzero is required, degenerate map, p = inf."""

    exit_code = 1
    code = "domain"


class BudgetExceeded(DmlError):
    """A computation hit an explicit size or iteration budget.

    ``payload`` holds whatever was left unresolved (e.g. an unfactored cofactor).
    """

    exit_code = 2
    code = "budget"

    def __init__(self, message: str, payload=None, location: str | None = None):
        super().__init__(message, location)
        self.payload = payload


class ParseError(DmlError, ValueError):
    exit_code = 3
    code = "parse"
