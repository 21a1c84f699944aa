"""Exception types. Input errors map to CLI exit code 2."""


class IndCountError(Exception):
    pass


class InputError(IndCountError, ValueError):
    """Malformed or out-of-contract input supplied by the caller."""


class StructureError(IndCountError):
    """A structural precondition (forest, reducedness, ...) does not hold."""


class PreconditionError(IndCountError, ValueError):
    pass


class SizeError(IndCountError):
    """An exponential-time routine was asked to run above its vertex cap."""
