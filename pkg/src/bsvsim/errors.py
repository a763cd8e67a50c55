"""Exception types shared across the package.

The CLI maps these onto exit codes (2, 3, 4).
"""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ResourceLimitError(RuntimeError):
    """Exact computation would exceed a configured size cap."""


class FitError(RuntimeError):
    """Non-linear fit failed to converge or data is degenerate."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
