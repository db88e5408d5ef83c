"""
Configuration management for the quantitative algebra toolkit.
"""

import os
from dataclasses import dataclass, field
from typing import Optional, Tuple
import logging
from pathlib import Path

from .finitarity import DEFAULT_EPS_GRID
from .reports import OutputFormat
from .terms import DEFAULT_UNIVERSE_CAP

# Configure logging for this module
logger = logging.getLogger(__name__)

UNIVERSE_CAP_ENV = "QALG_UNIVERSE_CAP"

UNIVERSE_CAP_FILE = Path.home() / ".qalg-universe-cap"

SUBCOMMANDS = ("counterexample", "free", "meet", "check", "laws", "colimit", "condition", "factorize")


def _parse_cap(raw: str, source: str) -> int:
    try:
        value = int(str(raw).strip())
    except ValueError:
        raise ValueError(f"Universe cap from {source} is not an integer: {raw!r}") from None
    if value <= 0:
        raise ValueError(f"Universe cap from {source} must be positive, got {value}")
    return value


@dataclass
class RunConfig:
    """Holds the parameters of one CLI run."""
    subcommand: str
    eps: Optional[float] = None
    max_depth: int = 2
    max_len: int = 3
    stages: Optional[int] = None
    eps_grid: Tuple[float, ...] = DEFAULT_EPS_GRID
    output_format_str: str = "json"  # "json", "csv" or "text"
    output_path: Optional[str] = None
    log_dir: Optional[str] = None
    verbose: bool = False
    universe_cap: Optional[int] = None  # explicit override
    local_base_dir: str = "."

    # --- Derived properties ---
    output_format: OutputFormat = field(init=False)
    resolved_universe_cap: int = field(init=False)

    def __post_init__(self):
        """Validate ranges and resolve derived settings after initialization."""
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"Invalid subcommand: {self.subcommand}")
        try:
            self.output_format = OutputFormat(self.output_format_str)
        except ValueError:
            raise ValueError(f"Invalid output format: {self.output_format_str}") from None

        self._validate_ranges()
        self.resolved_universe_cap = self._resolve_universe_cap()

    def _validate_ranges(self) -> None:
        """
        Raises:
            ValueError: If a numeric parameter is outside its documented range
        """
        if self.subcommand == "counterexample":
            if self.eps is None or not 0 < self.eps < 1:
                raise ValueError(f"eps must satisfy the assumption 0 < eps < 1, got {self.eps}")
            if self.max_depth < 2:
                raise ValueError(f"max_depth must be >= 2 (the witness trees have depth 2), got {self.max_depth}")
        if self.eps is not None and self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.max_len < 0:
            raise ValueError(f"max_len must be >= 0, got {self.max_len}")
        if self.stages is not None and self.stages < 1:
            raise ValueError(f"stages must be >= 1, got {self.stages}")
        if any(e < 0 for e in self.eps_grid):
            raise ValueError(f"eps grid values must be >= 0, got {list(self.eps_grid)}")

    # --- Universe cap resolution ---

    def _resolve_universe_cap(self) -> int:
        """
        Resolve the term-universe size guard based on:
        1) Explicit universe_cap if provided
        2) Environment variable QALG_UNIVERSE_CAP
        3) ~/.qalg-universe-cap file
        4) Default 1_000_000

        Returns:
            Resolved cap

        Raises:
            ValueError: If the chosen value is not a positive integer
        """
        # 1) Explicit override takes precedence
        if self.universe_cap is not None:
            return _parse_cap(self.universe_cap, "--universe-cap")

        # 2) Environment variable
        env_cap = os.getenv(UNIVERSE_CAP_ENV)
        if env_cap and env_cap.strip():
            logger.info(f"Universe cap loaded from environment variable {UNIVERSE_CAP_ENV}.")
            return _parse_cap(env_cap, UNIVERSE_CAP_ENV)

        # 3) Cap file
        try:
            if UNIVERSE_CAP_FILE.is_file():
                content = UNIVERSE_CAP_FILE.read_text(encoding="utf-8").strip()
                if content:
                    return _parse_cap(content, str(UNIVERSE_CAP_FILE))
        except OSError as e:
            logger.debug(f"Failed to read universe cap file {UNIVERSE_CAP_FILE}: {e}")

        # 4) Default
        return DEFAULT_UNIVERSE_CAP

    @property
    def log_filepath(self) -> Optional[str]:
        """
        Returns the path to the log file, or None when no log directory is configured.
        Creates the log directory if it doesn't exist.
        """
        if not self.log_dir:
            return None
        local_log_dir = os.path.join(self.local_base_dir, self.log_dir)

        try:
            os.makedirs(local_log_dir, exist_ok=True)
        except OSError as e:
            logger.error(f"Failed to create log directory '{local_log_dir}': {e}")
            raise

        return os.path.join(local_log_dir, "qalg.log")
