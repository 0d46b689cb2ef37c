"""Exception hierarchy. Every library error is a ``DomainError`` so the CLI can map it to exit code 1."""

from __future__ import annotations


class DomainError(Exception):
    """Base class for errors caused by mathematically invalid input."""

    code = "domain_error"

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


class NotSkewSymmetrizable(DomainError):
    code = "not_skew_symmetrizable"


class DimensionMismatch(DomainError):
    code = "dimension_mismatch"


class IndexOutOfRange(DomainError):
    code = "index_out_of_range"


class NotAdmissible(DomainError):
    code = "not_admissible"

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class PreconditionError(DomainError):
    code = "precondition"


class StructureViolation(DomainError):
    code = "structure_violation"

    def __init__(self, clause: str, message: str):
        super().__init__(f"[{clause}] {message}")
        self.clause = clause


class ConsistencyError(DomainError):
    """An internal check that a theorem guarantees has failed."""

    code = "consistency"


class SearchExhausted(DomainError):
    code = "search_exhausted"
