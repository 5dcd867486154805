"""Exception types shared across the package."""


class LinbaiError(Exception):
    """Base class for all package errors."""


class InvalidInputError(LinbaiError, ValueError):
    """An argument violates a precondition (non-finite, wrong shape, bad range)."""


class InvalidInstanceError(LinbaiError, ValueError):
    """A problem instance violates its invariants (non-unique best arm, non-spanning arms)."""


class SingularDesignError(LinbaiError, ValueError):
    """An operation requires an invertible design matrix but got a singular one."""


class InvalidConfigError(LinbaiError, ValueError):
    """A run or benchmark configuration is inconsistent."""


class InstanceParseError(LinbaiError, ValueError):
    """An instance file could not be parsed; carries the offending line number."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")
