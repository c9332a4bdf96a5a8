"""Exception hierarchy shared across the package.

CLI exit-code mapping: InputError (and subclasses) -> 1, CorrectnessError -> 2.
"""


class InputError(ValueError):
    """Bad caller input: out-of-range ids, malformed files, invalid parameters."""


class ParseError(InputError):
    """Malformed text input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RoutingError(InputError):
    """A query was sent to an index that cannot answer it exactly.

    Raised for same-district non-border pairs against the border labels;
    the caller should dispatch to the district index instead.
    """


class CorrectnessError(AssertionError):
    """An internal exactness check failed (an answer disagreed with the oracle)."""
