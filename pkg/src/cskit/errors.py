"""Exception hierarchy shared across the toolkit."""


class CskitError(Exception):
    """Base class for all toolkit errors."""


class UnknownTagError(CskitError):
    """A language-tag literal is not covered by the alias table."""

    def __init__(self, literal: str):
        super().__init__(f"unknown language tag literal: {literal!r}")
        self.literal = literal


class ConllParseError(CskitError):
    """A token/tag line could not be parsed."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class UnknownIdError(CskitError):
    """A record references an identifier that does not exist."""


class SplitMismatchError(CskitError):
    """An operation targeted a record on the wrong corpus split."""


class BackendError(CskitError):
    """A generation or embedding backend call failed."""


class ConstantInputError(CskitError):
    """Correlation is undefined because an input sequence is constant."""


class AuthorizationError(CskitError):
    """The caller is not allowed to act on the requested task."""


class ConflictError(CskitError):
    """A judgment was already recorded for this task."""


class SchemaError(CskitError):
    """An input file does not match its documented format."""
