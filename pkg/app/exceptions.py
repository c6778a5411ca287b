"""Error types shared by every service.

Each error carries the process exit code the command line reports for it and a
dictionary of details that is printed as ``key=value`` trailer lines.
"""
from __future__ import annotations

from typing import Optional


class RatfunError(Exception):
    """Base class for all expected failures."""

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[dict[str, object]] = None):
        super().__init__(message)
        self.message = message
        self.details: dict[str, str] = {k: str(v) for k, v in (details or {}).items()}

    def trailer(self) -> list[str]:
        return [f"{key}={value}" for key, value in self.details.items()]


class InputError(RatfunError):
    """Malformed text, unknown names, foreign letters, invalid partitions."""

    exit_code = 2


class PreconditionError(RatfunError):
    """The input is well formed but violates an operation's precondition."""

    exit_code = 3


class NotFunctionalError(PreconditionError):
    def __init__(self, witness: str, outputs: Optional[list[str]] = None):
        details: dict[str, object] = {"witness": witness}
        if outputs:
            details["outputs"] = ",".join(repr(o) for o in outputs)
        super().__init__(f"transducer is not functional on input {witness!r}", details)
        self.witness = witness


class AmbiguousTransducerError(PreconditionError):
    def __init__(self, message: str = "transducer is ambiguous; run disambiguate first"):
        super().__init__(message, {"hint": "disambiguate"})


class IncompleteBimachineError(PreconditionError):
    def __init__(self, missing: str):
        super().__init__(
            "bimachine output function is not total; run complete_bimachine first",
            {"missing": missing},
        )


class UnsupportedVarietyError(PreconditionError):
    pass


class RefinementError(PreconditionError):
    pass


class EmptyDomainError(PreconditionError):
    def __init__(self, what: str = "transducer"):
        super().__init__(f"{what} has an empty domain")


class PrefixError(PreconditionError, ValueError):
    def __init__(self, u: str, v: str):
        super().__init__(f"{u!r} is not a prefix of {v!r}", {"prefix": u, "word": v})


class NotSequentialisableError(RatfunError):
    """Raised by transducer determinization when the delay guard trips."""

    exit_code = 4

    def __init__(self, state: str, delay: str, bound: int):
        super().__init__(
            f"transducer is not sequentialisable: delay {delay!r} at state {state} "
            f"exceeds bound {bound}",
            {"state": state, "delay": delay, "bound": bound},
        )


class SearchLimitError(RatfunError):
    """A bounded search ran out of candidates before reaching a verdict."""

    exit_code = 5

    def __init__(self, limit: int, candidates: int):
        super().__init__(
            f"coarsening search stopped after {limit} candidates without a verdict; "
            f"raise RATFUN_LATTICE_MAX_CANDIDATES to search further",
            {"verdict": "inconclusive", "limit": limit, "candidates": candidates},
        )
        self.limit = limit
        self.candidates = candidates


class InvariantViolation(RatfunError):
    """A construction contradicted one of its own invariants."""

    exit_code = 70
