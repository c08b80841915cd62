"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A computation produced output inconsistent with its mathematical contract."""
