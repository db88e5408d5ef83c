"""
Unit tests for the utils module.
"""

import json
import os
from pathlib import Path
from unittest.mock import patch

import pytest

from src.utils import (
    ensure_directory_exists,
    load_json_file,
    resolve_relative,
    split_top_level,
    write_output,
)


class TestLoadJsonFile:
    """Test the load_json_file function."""

    def test_valid_file(self, temp_dir):
        """Test loading a valid JSON file."""
        path = os.path.join(temp_dir, "space.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"points": ["a"]}, f)

        assert load_json_file(path) == {"points": ["a"]}

    def test_missing_file(self, temp_dir):
        """Test that a missing file raises FileNotFoundError with its path."""
        path = os.path.join(temp_dir, "missing.json")
        with pytest.raises(FileNotFoundError, match="missing.json"):
            load_json_file(path)

    def test_invalid_json_reports_position(self, temp_dir):
        """Test that parse errors carry file, line and column."""
        path = os.path.join(temp_dir, "broken.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write('{\n  "points": [\n}')

        with pytest.raises(ValueError, match=r"broken\.json:3:1: invalid JSON"):
            load_json_file(path)


class TestResolveRelative:
    """Test the resolve_relative function."""

    def test_absolute_path_unchanged(self):
        """Test that absolute paths are returned as given."""
        assert resolve_relative("/data/x.json", "/other/variety.json") == "/data/x.json"

    def test_relative_to_base_file(self):
        """Test that missing relative paths resolve next to the base file."""
        result = resolve_relative("no-such-monoid.json", "/configs/variety.json")
        assert result == os.path.join("/configs", "no-such-monoid.json")

    def test_no_base_file(self):
        """Test that without a base file the path is unchanged."""
        assert resolve_relative("x.json", None) == "x.json"


class TestWriteOutput:
    """Test the write_output function."""

    def test_writes_to_stdout(self, capsys):
        """Test that output goes to stdout with a trailing newline."""
        write_output("report")
        assert capsys.readouterr().out == "report\n"

    def test_writes_to_file_creating_directories(self, temp_dir):
        """Test writing into a directory that does not exist yet."""
        path = os.path.join(temp_dir, "out", "report.json")
        write_output("{}\n", path)

        assert Path(path).read_text(encoding="utf-8") == "{}\n"


class TestEnsureDirectoryExists:
    """Test the ensure_directory_exists function."""

    def test_create_new_directory(self, temp_dir):
        """Test creating nested directories."""
        new_dir = os.path.join(temp_dir, "logs", "nested")
        result = ensure_directory_exists(new_dir)

        assert result.is_dir()
        assert result == Path(new_dir).resolve()

    def test_existing_directory(self, temp_dir):
        """Test that an existing directory is accepted."""
        assert ensure_directory_exists(temp_dir) == Path(temp_dir).resolve()

    @pytest.mark.parametrize("path", ["", "   "])
    def test_empty_path(self, path):
        """Test that empty paths are rejected."""
        with pytest.raises(ValueError, match="cannot be empty"):
            ensure_directory_exists(path)

    @patch("src.utils.Path.mkdir")
    def test_permission_error(self, mock_mkdir, temp_dir):
        """Test that creation errors propagate."""
        mock_mkdir.side_effect = PermissionError("Permission denied")

        with pytest.raises(PermissionError):
            ensure_directory_exists(os.path.join(temp_dir, "denied"))


class TestSplitTopLevel:
    """Test the split_top_level function."""

    def test_respects_nesting(self):
        """Test that separators inside brackets are kept."""
        assert split_top_level("(sigma1 a b), {p,q}, [a,b]") == ["(sigma1 a b)", "{p,q}", "[a,b]"]

    def test_custom_separator(self):
        """Test splitting on semicolons."""
        assert split_top_level("a,b;b,c;", ";") == ["a,b", "b,c"]

    def test_unbalanced(self):
        """Test that unbalanced brackets are rejected."""
        with pytest.raises(ValueError, match="Unbalanced"):
            split_top_level("(a, b")
