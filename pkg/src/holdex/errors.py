class HoldexError(Exception):
    """Base class for errors raised by holdex."""


class DataError(HoldexError, ValueError):
    """Input data or parameters violate a precondition."""


class InvariantError(HoldexError, RuntimeError):
    """An internal invariant was violated. Always a bug."""
