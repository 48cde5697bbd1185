"""Exception types raised across the package."""


class MovantError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(MovantError, ValueError):
    pass


class QuantizationCollision(MovantError, ValueError):
    pass


class RangeError(MovantError, ValueError):
    """An argument lies outside the domain the model is defined on.

    ``interval`` carries the admissible range when one is known.
    """

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class ConfigError(MovantError, ValueError):
    pass


class InfeasibleLayout(MovantError, ValueError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class RankDeficient(MovantError, ArithmeticError):
    pass


class SingularKernel(MovantError, ArithmeticError):
    pass


class LowSignal(MovantError, ValueError):
    pass
