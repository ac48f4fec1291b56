"""Exception types shared across the package.

The CLI maps these onto exit codes: syntax and configuration problems
exit 1, violated computation preconditions exit 2.
"""


class KdlabError(Exception):
    """Base class for all package-specific errors."""


class GroupSpecError(KdlabError, ValueError):
    """Malformed group specification string; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class GroupMismatchError(KdlabError, ValueError):
    """Operands defined over different groups."""


class PreconditionError(KdlabError, ValueError):
    """A computation precondition does not hold for the given input."""


class SubgroupBoundError(PreconditionError):
    """Group order exceeds the configured subgroup-enumeration bound."""


class UnsupportedOrderError(PreconditionError):
    """Half-integer ordering requested on a group with an even factor."""


class NotHermitianError(PreconditionError):
    """Hermitian input required."""


class NotAStateError(PreconditionError):
    """Operator fails a state precondition (Hermitian, positive, unit trace)."""


class NotKdPositiveError(PreconditionError):
    """Hull-membership query on an operator outside the KD-positive set."""
