"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: precondition violations exit 2,
exhausted searches exit 3, precision shortfalls exit 4.
"""


class SHPointsError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class PreconditionError(SHPointsError):
    """Input violates a documented precondition."""

    exit_code = 2


class InapplicableFieldError(PreconditionError):
    """Splitting conditions on (p, M, K) fail for the requested field."""


class SearchBoundError(SHPointsError):
    """A bounded search was exhausted.

    The prime search in the elementary decomposition terminates only under
    GRH; when the bound runs out we report rather than loosen invariants.
    """

    exit_code = 3


class PrecisionError(SHPointsError):
    """A numeric result could not be certified at the requested precision."""

    exit_code = 4
