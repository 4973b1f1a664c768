"""Exception types shared across the package."""


class PermredError(Exception):
    """Base class for all package errors."""


class ParseError(PermredError, ValueError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class BudgetError(PermredError, RuntimeError):
    """A brute-force routine was asked to exceed its size budget."""


class RealnessError(PermredError, ValueError):
    """An entry that must be real carries a non-negligible imaginary part."""


class CircuitError(PermredError, ValueError):
    """A circuit is structurally invalid or uses an unsupported gate."""
