"""Exception hierarchy shared by the library and the CLI."""


class PicreconError(Exception):
    """Base class for all errors raised by picrecon."""


class InputError(PicreconError, ValueError):
    """An argument is outside the domain of the operation."""


class ParseError(InputError):
    """A text file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedDeckError(InputError):
    """A deck whose total is not (n - k + 1)**2 for any n."""


class UnsupportedError(PicreconError):
    """The reconstruction phases are undefined for this (n, k)."""


class ResourceError(PicreconError):
    """An exhaustive computation would be too large."""


class StaleCheckpointError(PicreconError, RuntimeError):
    """A checkpoint token was already rolled back or released."""
