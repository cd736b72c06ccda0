"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """Raised when an input violates an operation's precondition."""


class NumericalFailureError(ArithmeticError):
    """Raised when a numerical routine cannot produce a trustworthy result."""


class DegenerateFitError(NumericalFailureError):
    """Raised when a regression has too few usable points to be fitted."""


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configurations."""
