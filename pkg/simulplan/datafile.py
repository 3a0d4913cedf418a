"""Bundled JSON data and user JSON files."""

import copy
import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Union

from .exceptions import ConfigError

try:
    from importlib.resources import files  # type: ignore[attr-defined]
except ImportError:
    # Compatibility for Python <3.9
    from importlib_resources import files  # type: ignore[no-redef]

logger = logging.getLogger(__name__)

FILENAMES = {
    "defaults": "data/defaults.json",
    "matrix_games": "data/matrix_games.json",
}


def get_file(file_alias: str) -> Any:
    """Get the path of a bundled data file"""
    return files(__package__).joinpath(FILENAMES[file_alias])


@lru_cache(maxsize=None)
def _load_bundled(file_alias: str) -> Any:
    with get_file(file_alias).open(encoding="utf-8") as f:
        return json.load(f)


def load_file(file_alias: str) -> Any:
    """Load a bundled JSON file.

    Callers get their own copy and may modify it.
    """
    return copy.deepcopy(_load_bundled(file_alias))


def read_json(path: Union[str, Path]) -> Any:
    """Parse a user JSON file.

    Raises
    ------
    ConfigError
        When the file cannot be read, or with the line and column of the
        first syntax error.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(path=path, reason=e.strerror or str(e))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            path=path, line=e.lineno, column=e.colno, reason=e.msg
        )
    logger.debug(f"read {path}")
    return data
