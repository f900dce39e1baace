"""Exception hierarchy shared by all modules (the CLI maps these to exit codes)."""


class InputError(ValueError):
    """Malformed or out-of-contract input."""


class InvariantViolation(RuntimeError):
    """A mathematical invariant failed to hold; indicates a bug or an invalid model."""


class ConvergenceError(InvariantViolation):
    """An iterative method exhausted its iteration budget."""
