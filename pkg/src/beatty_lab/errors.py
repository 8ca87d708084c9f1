"""Exception hierarchy shared by all modules."""


class BeattyLabError(Exception):
    """Base class for every error raised by this package."""


class InputError(BeattyLabError, ValueError):
    """Bad user input (maps to CLI exit code 1)."""


class RationalParameterError(InputError):
    """An irrational parameter was required but a rational one was supplied."""


class PreconditionViolated(InputError):
    pass


class NumericError(BeattyLabError, ArithmeticError):
    """Precision/capacity failures (maps to CLI exit code 2)."""


class UndecidableAtPrecision(NumericError):
    """An interval comparison straddles the decision boundary."""


class PrecisionExhausted(NumericError):
    pass


class InsufficientConvergents(NumericError):
    pass


class CapacityExceeded(NumericError):
    pass


class NotFoundBelowCap(NumericError):
    def __init__(self, cap):
        super().__init__(f"no qualifying prime <= {cap}")
        self.cap = cap


class ConstructionFailed(BeattyLabError, RuntimeError):
    """A validated construction failed its own checks (an implementation bug)."""
