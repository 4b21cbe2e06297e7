"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: usage errors exit 1, data errors
(anything derived from :class:`DataError`) exit 2, backend failures exit 3.
"""


class GecSynthError(Exception):
    """Base class for all toolkit errors."""


class DataError(GecSynthError):
    """Invalid or unusable input data."""


class EmptyInputError(DataError):
    """An operation received empty input where content is required."""


class ParseError(DataError):
    """Malformed serialized data (prefix strings, TSV/JSONL records)."""

    def __init__(self, message: str, *, offset: int | None = None, line: int | None = None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if offset is not None:
            loc.append(f"byte offset {offset}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.offset = offset
        self.line = line


class EmptyInventoryError(DataError):
    """Mining produced no usable corruption patterns."""


class TuningError(DataError):
    """Threshold tuning cannot proceed (e.g. dev set without positives)."""


class BackendError(GecSynthError):
    """An external corruption backend failed."""
