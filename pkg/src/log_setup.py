"""
Root logger configuration for CLI runs.
"""

import logging
import os
import sys
from typing import Optional

# --- Logging Configuration Flag ---
_logger_configured = False
# Get logger for this module
logger = logging.getLogger(__name__)


def setup_logging(log_filepath: Optional[str] = None, verbose: bool = False) -> None:
    """
    Configures the root logger once: console on stderr, plus a file when a path is given.

    Reports are written to stdout by the CLI and never pass through logging.

    Args:
        log_filepath: Log file location, or None for console-only logging.
        verbose: Log at DEBUG instead of WARNING on the console.
    """
    global _logger_configured
    if _logger_configured:
        return
    try:
        log_formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(log_formatter)
        console_handler.setLevel(logging.DEBUG if verbose else logging.WARNING)

        root_logger = logging.getLogger()
        # Clear existing handlers to prevent duplicates if run repeatedly in one process
        for handler in root_logger.handlers[:]:
            root_logger.removeHandler(handler)
            handler.close()
        root_logger.addHandler(console_handler)

        if log_filepath:
            log_dir = os.path.dirname(log_filepath)
            if log_dir:
                os.makedirs(log_dir, exist_ok=True)
            file_handler = logging.FileHandler(log_filepath, encoding='utf-8')
            file_handler.setFormatter(log_formatter)
            file_handler.setLevel(logging.INFO)
            root_logger.addHandler(file_handler)

        root_logger.setLevel(logging.DEBUG if verbose else logging.INFO)
        _logger_configured = True
        logger.info(f"Logging configured. Log file: {log_filepath or '(none)'}")

    except Exception as e:
        # Fallback to basic console logging if setup fails
        logging.basicConfig(level=logging.ERROR)
        logging.error(f"Failed to configure file logging to {log_filepath}: {e}. Falling back to console logging.")
        _logger_configured = True  # Mark as configured to prevent retries
