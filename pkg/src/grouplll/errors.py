"""Exception types raised by the library."""


class GroupLLLError(Exception):
    """Base class for all library errors."""


class DimensionError(GroupLLLError, ValueError):
    pass


class SingularMatrixError(GroupLLLError, ZeroDivisionError):
    pass


class NotPositiveDefiniteError(GroupLLLError, ValueError):
    """A Gram–Schmidt norm came out non-positive."""


class IncompatibleFormError(GroupLLLError, ValueError):
    """The inner product does not respect the group's defining structure."""


class UnknownRootError(GroupLLLError, KeyError):
    pass


class DriftError(GroupLLLError, ArithmeticError):
    """An updated matrix left the unipotent group by more than the tolerance."""


class IterationCapExceeded(GroupLLLError, RuntimeError):
    pass
