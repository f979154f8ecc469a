class PmadmError(Exception):
    """Base class for errors raised by this package."""


class InputError(PmadmError, ValueError):
    """Malformed or out-of-contract input."""


class DegenerateInputError(InputError):
    """Input is well-formed but the requested computation is undefined for it."""


class InvariantViolation(PmadmError, RuntimeError):
    """An internal consistency check failed."""
