"""Exception hierarchy shared across the toolkit.

InputError covers everything caused by bad user input (malformed files,
violated preconditions); InvariantError covers internal consistency
failures that should never happen on valid input. The CLI maps these to
exit codes 2 and 3 respectively.
"""


class WordspaceError(Exception):
    pass


class InputError(WordspaceError, ValueError):
    """Bad input: malformed file, out-of-range parameter, missing data."""


class FormatError(InputError):
    """Parse failure in a data file; message carries the location."""

    def __init__(self, message: str, *, path=None, line=None, offset=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if offset is not None:
            loc.append(f"byte {offset}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.path = path
        self.line = line
        self.offset = offset


class InvariantError(WordspaceError):
    """Internal invariant violated; indicates a bug, not bad input."""
