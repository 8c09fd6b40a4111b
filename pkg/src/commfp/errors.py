"""Exception hierarchy.

Two families matter to callers: :class:`InputError` (the input itself is
malformed or violates an assumption) and :class:`ResourceLimitError` (the
input is fine but the requested computation exceeds a configured cap). The
CLI maps them to exit codes 1 and 2.
"""


class CommFPError(Exception):
    """Base class for all package errors."""


class InputError(CommFPError, ValueError):
    pass


class ResourceLimitError(CommFPError):
    pass


class DuplicateRotation(InputError):
    pass


class EmptyRotation(InputError):
    pass


class SizeViolation(InputError):
    pass


class NotNormalized(InputError):
    pass


class DependentHamiltonians(InputError):
    pass


class RankDeficient(InputError):
    pass


class InvalidArchitecture(InputError):
    pass


class DegenerateFit(InputError):
    pass


class RankTooLarge(ResourceLimitError):
    pass


class TooManyCircuits(ResourceLimitError):
    pass


class TooManyQubits(ResourceLimitError):
    pass


class SupportTooLarge(ResourceLimitError):
    pass


class GridTooLarge(ResourceLimitError):
    pass
