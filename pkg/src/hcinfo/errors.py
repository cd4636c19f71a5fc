"""Exception hierarchy shared by every module.

All errors derive from ``ValueError`` so callers that only care about
"bad input" can catch that.
"""


class HcinfoError(ValueError):
    """Base class for all library errors."""


class ValidationError(HcinfoError):
    """A value violates one of its type invariants."""


class AlignmentError(HcinfoError):
    """Two structures that must share labels or dimensions do not."""


class DomainError(HcinfoError):
    """An argument lies outside the domain of an operation."""


class ContractError(HcinfoError):
    """An operation was called with inputs that break its preconditions."""


class SizeError(HcinfoError):
    """Refusing to enumerate an alphabet that is too large."""


class FormatError(HcinfoError):
    """Malformed textual input (bit strings, CSV rows, JSON documents).

    ``problems`` collects every individual failure so they can be
    reported together.
    """

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems or [])

    def __str__(self):
        base = super().__str__()
        if not self.problems:
            return base
        return base + "\n" + "\n".join(f"  {p}" for p in self.problems)
