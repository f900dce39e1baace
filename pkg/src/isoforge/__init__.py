"""Discrete isoperimetric inequalities on weighted periodic graphs."""

from .errors import ConvergenceError, InputError, InvariantViolation

__all__ = ["ConvergenceError", "InputError", "InvariantViolation"]
__version__ = "0.1.0"
