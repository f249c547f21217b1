"""Exception hierarchy shared by loaders, matchers and the CLI."""


class EAlignError(Exception):
    """Base class for all package errors."""


class ConfigurationError(EAlignError, ValueError):
    """Inconsistent parameters, e.g. embedding tables of different width."""


class UsageError(EAlignError, ValueError):
    """A function was called outside its contract (bad index, bad alignment)."""


class DataError(EAlignError, ValueError):
    """Input data violates an invariant (non-finite score, duplicate key)."""


class ParseError(DataError):
    """A line of an input file could not be parsed."""

    def __init__(self, path, lineno, message):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{self.path}:{lineno}: {message}")


class NumericalError(EAlignError, ArithmeticError):
    """A numerical routine produced non-finite or degenerate values."""
