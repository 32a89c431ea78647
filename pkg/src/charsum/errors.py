"""Exception types shared across the package."""


class CharsumError(Exception):
    """Base class for all errors raised by this package."""


class FieldError(CharsumError, ValueError):
    """Invalid field parameters (non-prime modulus, bad subfield degree, ...)."""


class BudgetExceeded(CharsumError):
    """A predicted enumeration size is larger than the configured budget."""

    def __init__(self, what: str, needed: int, budget: int):
        self.what = what
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what}: needs {needed} iterations, budget is {budget}")


class ConfigError(CharsumError, ValueError):
    """Malformed or inconsistent experiment configuration."""


class IrreducibilityUnverified(CharsumError):
    """A multivariate factorization was used without the absolute-irreducibility assertion."""
