"""Exception hierarchy shared across koopkit."""


class KoopkitError(Exception):
    """Base class for all koopkit errors."""


class InvalidInputError(KoopkitError, ValueError):
    """Raised when an argument violates a precondition."""


class NumericalError(KoopkitError, ArithmeticError):
    """Raised when a factorization or solve fails."""


class SingularityError(KoopkitError, ArithmeticError):
    """Raised when an iteration map is undefined at a state.

    The offending state is kept on ``state`` so callers can report it.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class DivergenceError(KoopkitError, ArithmeticError):
    """Raised when an analytic eigenfunction is evaluated at one of its poles."""


class FitError(KoopkitError):
    """Raised when an EDMD fit cannot be performed."""


class AnalysisError(KoopkitError):
    """Raised when a downstream analysis lacks the spectral data it needs."""


class ConfigError(KoopkitError):
    """Raised for experiment configurations that fail validation."""


class CSVFormatError(KoopkitError, ValueError):
    """Raised for malformed or ragged CSV input."""
