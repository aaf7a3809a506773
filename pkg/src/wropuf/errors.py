class WroPufError(Exception):
    """Base class for all errors raised by this package."""


class InvariantError(WroPufError, ValueError):
    """A model parameter or input violates a documented invariant."""


class EnvironmentRangeError(InvariantError):
    """The environment pushes an oscillator period multiplier to <= 0."""


class ConfigError(WroPufError, ValueError):
    """A scenario configuration file cannot be parsed."""


class CorpusError(WroPufError, ValueError):
    """A response corpus is malformed.

    ``line`` is the 1-based line number of the offending record, if any.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
