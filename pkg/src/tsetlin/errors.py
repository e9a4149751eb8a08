"""Exception types shared across the package."""


class TsetlinError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TsetlinError, ValueError):
    """Invalid hyperparameter or machine configuration."""


class WidthMismatchError(TsetlinError, ValueError):
    """Input width does not match the machine/clause width."""


class DatasetFormatError(TsetlinError, ValueError):
    """Malformed dataset file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
