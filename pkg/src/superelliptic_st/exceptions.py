class SuperellipticError(Exception):
    """Base class for errors raised by this package."""


class BadReductionError(SuperellipticError, ValueError):
    """The requested prime divides the discriminant (q == ell)."""


class ResourceGuardError(SuperellipticError, ValueError):
    """A size argument exceeds a configured memory or sample guard."""

    def __init__(self, what, value, guard):
        self.value = value
        self.guard = guard
        super().__init__(f"{what}={value} exceeds guard {guard}")


class CacheError(SuperellipticError, ValueError):
    """Malformed or inconsistent point-count cache file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
