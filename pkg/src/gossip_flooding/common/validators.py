"""Validation utilities for the gossip flooding package.

This module provides reusable checks for file system paths and numeric
arguments, so that every entry point reports bad input with the same kind of
error and message.
"""
from pathlib import Path

from .errors import ConfigError, InvalidSizeError


def validate_file(path: Path, name: str = "File") -> None:
    """Validate that a path exists and is a file.

    Args:
        path: Path object to validate
        name: Descriptive name for the file, used in error messages
              (e.g., "Edge-list file", "Verify config")

    Raises:
        ConfigError: If path does not exist or is not a file

    Example:
        >>> from pathlib import Path
        >>> validate_file(Path("./ring.edges"), "Edge-list file")
        # Raises ConfigError if ring.edges doesn't exist
    """
    if not path.is_file():
        raise ConfigError(f"{name} not found: {path}")


def validate_json_file(path: Path, name: str = "JSON file") -> None:
    """Validate that a path exists, is a file, and has a .json extension.

    Args:
        path: Path object to validate
        name: Descriptive name for the JSON file, used in error messages

    Raises:
        ConfigError: If path does not exist, is not a file, or doesn't
                     have a .json extension
    """
    if not path.is_file() or path.suffix != ".json":
        raise ConfigError(f"{name} is not a valid JSON file: {path}")


def validate_min(value: int, minimum: int, name: str) -> None:
    """Validate that an integer argument is at least ``minimum``.

    Args:
        value: The value supplied by the caller
        minimum: Smallest allowed value
        name: Argument name used in the error message

    Raises:
        InvalidSizeError: If value is not an int or is below minimum
    """
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidSizeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidSizeError(f"{name} must be >= {minimum}, got {value}")


def validate_range(value: int, low: int, high: int, name: str) -> None:
    """Validate that an integer argument lies in the closed range [low, high].

    Raises:
        InvalidSizeError: If value is not an int or is outside the range
    """
    validate_min(value, low, name)
    if value > high:
        raise InvalidSizeError(f"{name} must be <= {high}, got {value}")


def validate_probability(value: float, name: str = "p") -> None:
    """Validate an edge probability in (0, 1].

    Raises:
        InvalidSizeError: If value is outside (0, 1]
    """
    if not 0.0 < value <= 1.0:
        raise InvalidSizeError(f"{name} must lie in (0, 1], got {value}")
