"""Exception hierarchy; the CLI maps these onto exit codes."""


class PecError(Exception):
    """Base class for all package errors."""


class InputError(PecError):
    """Malformed channel/graph/cut specs or bad argument values (exit 2)."""


class ModelRestrictionError(PecError):
    """The requested computation is outside the supported model class (exit 3)."""


class PreconditionError(ModelRestrictionError):
    """A scheme parameter condition is violated."""


class CapExceededError(PecError):
    """An enumeration cap (permutation tuples, destinations) was exceeded (exit 4)."""
