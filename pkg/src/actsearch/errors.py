from pathlib import Path
from typing import Optional, Union


class ActiveSearchError(Exception):
    """Base class for every error raised by the actsearch library."""


class DatasetError(ActiveSearchError, ValueError):
    """Invalid points, labels or datasets."""


class DatasetFormatError(DatasetError):
    """A dataset file that does not follow the `x,y,label` CSV format."""

    def __init__(
        self, message: str, path: Union[str, Path, None] = None, line: Optional[int] = None
    ):
        self.path = Path(path) if path is not None else None
        self.line = line
        location = ""
        if self.path is not None:
            location = f"{self.path}"
        if line is not None:
            location = f"{location}:{line}" if location else f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)


class ConfigurationError(ActiveSearchError, ValueError):
    """Invalid grid, search, oracle or benchmark configuration."""


class QueryError(ActiveSearchError, ValueError):
    """A query that cannot be answered against the given data."""
