"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`PinvPertError`
so callers (the CLI in particular) can map failures to exit codes.
"""


class PinvPertError(Exception):
    """Base class for all package errors."""


class InvalidInputError(PinvPertError, ValueError):
    """Non-finite entries, wrong rank of array, or otherwise malformed input."""


class DimensionError(PinvPertError, ValueError):
    """Operand shapes are incompatible."""


class InvalidWeightError(PinvPertError, ValueError):
    """A weight matrix is not Hermitian positive definite."""


class FormulaBreakdownError(PinvPertError, ArithmeticError):
    """A factor that a closed-form expression inverts is numerically singular."""

    def __init__(self, message, condition=float("inf"), factor=""):
        super().__init__(message)
        self.condition = condition
        self.factor = factor


class NotInvertibleError(PinvPertError, ArithmeticError):
    """``I + dT T^dag`` is not invertible at the working tolerance."""

    def __init__(self, message, sigma_min):
        super().__init__(message)
        self.sigma_min = sigma_min


class NotStableError(PinvPertError):
    """An operation that needs a stable perturbation got an unstable one."""


class ConstructionError(PinvPertError):
    """A randomized construction failed after the allowed number of retries."""


class NumericalInconsistencyError(PinvPertError, ArithmeticError):
    """Two routes to the same quantity disagree beyond tolerance."""


class ParseError(PinvPertError, ValueError):
    """A matrix file could not be parsed.

    ``location`` names the offending field (and line, when known).
    """

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
