"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class DegenerateIterateError(RuntimeError):
    """An iterate collapsed to the zero vector and cannot be normalized."""


class SamplingExhaustedError(RuntimeError):
    """Rejection sampling hit its retry budget without an admissible draw."""
