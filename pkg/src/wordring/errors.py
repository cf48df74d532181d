"""Exception hierarchy.

Input problems (bad files, bad tokens, invalid parameters) derive from
:class:`InputError`; the CLI maps them to exit code 1.
"""


class InputError(ValueError):
    """Base class for errors caused by user-supplied input."""


class ParameterError(InputError):
    """A parameter vector lies outside the valid region of a model."""


class DataError(InputError):
    """Base class for dataset parsing and validation errors."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownOrderError(DataError):
    """A token is not one of the six orderings of S, V and O."""


class MalformedRowError(DataError):
    pass


class HeaderError(DataError):
    pass


class DuplicateEntryError(DataError):
    pass


class NegativeCountError(DataError):
    pass


class SelfPairError(DataError):
    pass


class EmptyDatasetError(DataError):
    pass


class InvariantError(RuntimeError):
    """An internal consistency check failed (a bug, not bad input)."""
