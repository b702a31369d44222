"""Exception types shared across the package."""


class LofscanError(Exception):
    """Base class for all package errors."""


class ConfigError(LofscanError, ValueError):
    """Invalid configuration or parameter combination."""


class LogFormatError(LofscanError, ValueError):
    """A log row could not be parsed."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


class InputError(LofscanError, ValueError):
    """Numeric input that the algorithms cannot handle (e.g. NaN)."""
