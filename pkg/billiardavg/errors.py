class BilliardError(Exception):
    """Base error. ``category`` is the token the CLI prints on failure."""

    category = "error"


class ConfigurationError(BilliardError):
    category = "config"


class SpectrumRangeError(BilliardError, ValueError):
    """A query fell outside the trustworthy part of a spectrum."""

    category = "range"


class SpectrumBudgetError(BilliardError):
    category = "resource"


class InvalidWindowError(BilliardError, ValueError):
    category = "argument"


class CurveMismatchError(BilliardError):
    category = "argument"


class ConvergenceError(BilliardError):
    category = "convergence"


class UnsupportedStatisticError(BilliardError):
    category = "unsupported"


class SaturationWarning(UserWarning):
    """Saturation window is wide enough to use but not comfortably so."""
