"""Exception hierarchy for the nobind package.

Exit-code mapping (see cli): config errors -> 2, numeric errors -> 3,
check failures -> 1.
"""


class NobindError(Exception):
    """Base class for all package errors."""


# --- configuration / input errors (exit code 2) ---

class ConfigError(NobindError):
    pass


class ParseError(ConfigError):
    """Malformed config text; message carries position information."""


class MissingField(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


# --- domain errors on inputs ---

class NonPositiveWidth(NobindError):
    pass


class RatioOutOfRange(NobindError):
    pass


class TruncationTooShort(NobindError):
    pass


class NonPositiveRadius(NobindError):
    pass


class RatioNotAboveOne(NobindError):
    pass


class PinningViolation(NobindError):
    pass


class StepGridInvalid(NobindError):
    pass


class GridMismatch(NobindError):
    pass


class CostGuardExceeded(NobindError):
    pass


# --- numeric failures (exit code 3) ---

class NumericError(NobindError):
    pass


class QuadratureFailure(NumericError):
    pass


class NoConvergence(NumericError):
    pass


class TailViolation(NumericError):
    def __init__(self, index: int, message: str = ""):
        self.index = index
        super().__init__(message or f"tail monotonicity violated at n={index}")


class UncertifiedTail(NumericError):
    pass


class IoError(NobindError):
    pass
