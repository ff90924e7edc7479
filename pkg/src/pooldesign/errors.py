"""Error taxonomy shared by the library, the CLI, and the HTTP service.

Every failure that crosses an interface boundary is one of these kinds, so
exit codes and HTTP statuses can be derived mechanically.
"""
from __future__ import annotations

from enum import Enum


class ErrorKind(str, Enum):
    BAD_INPUT = "bad_input"
    INFEASIBLE = "infeasible"
    INCONCLUSIVE = "inconclusive"
    NOT_FOUND = "not_found"
    INTERNAL = "internal"


EXIT_CODES = {
    ErrorKind.BAD_INPUT: 2,
    ErrorKind.INFEASIBLE: 3,
    ErrorKind.INCONCLUSIVE: 4,
    ErrorKind.NOT_FOUND: 5,
    ErrorKind.INTERNAL: 6,
}

HTTP_STATUS = {
    ErrorKind.BAD_INPUT: 400,
    ErrorKind.INFEASIBLE: 422,
    ErrorKind.INCONCLUSIVE: 409,
    ErrorKind.NOT_FOUND: 404,
    ErrorKind.INTERNAL: 500,
}


class PoolDesignError(Exception):
    """Base class; carries a machine-readable kind plus a human message."""

    kind: ErrorKind = ErrorKind.INTERNAL

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.kind]

    @property
    def http_status(self) -> int:
        return HTTP_STATUS[self.kind]


class BadInputError(PoolDesignError):
    """Caller supplied values outside the documented domain."""

    kind = ErrorKind.BAD_INPUT


class InfeasibleError(PoolDesignError):
    """The requested construction does not exist for these parameters."""

    kind = ErrorKind.INFEASIBLE


class NotFoundError(PoolDesignError):
    """A referenced resource (session, sweep cell) does not exist."""

    kind = ErrorKind.NOT_FOUND


class InternalError(PoolDesignError):
    kind = ErrorKind.INTERNAL
