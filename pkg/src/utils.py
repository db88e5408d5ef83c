"""
File and text helpers shared by the CLI and loaders.
"""

import json
import os
import sys
from pathlib import Path
from typing import Any, List, Optional


def load_json_file(file_path: str) -> Any:
    """
    Loads a JSON input file.

    Args:
        file_path: Path to the JSON file

    Returns:
        The decoded JSON value

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the file is not valid JSON; the message carries file, line and column
    """
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            text = f.read()
    except FileNotFoundError:
        raise FileNotFoundError(f"Input file not found: {file_path}") from None
    except OSError as e:
        raise ValueError(f"Cannot read input file '{file_path}': {e}") from e

    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"{file_path}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}") from e


def resolve_relative(path: str, base_file: Optional[str]) -> str:
    """Resolves path against the directory of base_file unless it is absolute or exists as given."""
    if os.path.isabs(path) or base_file is None or os.path.exists(path):
        return path
    return os.path.join(os.path.dirname(base_file), path)


def write_output(text: str, output_path: Optional[str] = None) -> None:
    """
    Writes a rendered report to a file, or to stdout when no path is given.

    Raises:
        OSError: If the output file cannot be written
    """
    if not text.endswith("\n"):
        text += "\n"
    if output_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    parent = os.path.dirname(output_path)
    if parent:
        ensure_directory_exists(parent)
    with open(output_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def ensure_directory_exists(dir_path: str) -> Path:
    """
    Ensures a directory exists, creating it if necessary.

    Args:
        dir_path: Directory path to ensure exists

    Returns:
        Path object for the directory

    Raises:
        ValueError: If path is invalid
        OSError: If directory cannot be created
    """
    if not dir_path or not dir_path.strip():
        raise ValueError("Directory path cannot be empty")

    path = Path(dir_path).resolve()
    path.mkdir(parents=True, exist_ok=True)

    return path


def split_top_level(text: str, separator: str = ",") -> List[str]:
    """
    Splits text on a separator that is not nested inside (), {} or [].

    Raises:
        ValueError: On unbalanced brackets
    """
    parts: List[str] = []
    depth = 0
    current: List[str] = []
    for ch in text:
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
            if depth < 0:
                raise ValueError(f"Unbalanced '{ch}' in {text!r}")
        if ch == separator and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ValueError(f"Unbalanced brackets in {text!r}")
    parts.append("".join(current).strip())
    return [p for p in parts if p]
