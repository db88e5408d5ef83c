"""
Test configuration and fixtures for pytest.
"""

import os
import tempfile
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from src.spaces import FinMetricSpace
from src.terms import Signature
from src.varieties import FiniteQuantAlgebra

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def space_from(points, pairs):
    """Builds a metric space from {(p, q): d} with infinity elsewhere."""
    n = len(points)
    matrix = np.full((n, n), np.inf)
    np.fill_diagonal(matrix, 0.0)
    index = {p: i for i, p in enumerate(points)}
    for (p, q), d in pairs.items():
        matrix[index[p], index[q]] = matrix[index[q], index[p]] = d
    return FinMetricSpace(tuple(points), matrix)


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield temp_dir


@pytest.fixture
def data_dir():
    """Directory of the shipped example inputs."""
    return DATA_DIR


@pytest.fixture
def ab1():
    """{a, b} with d(a, b) = 1."""
    return space_from(["a", "b"], {("a", "b"): 1.0})


@pytest.fixture
def ab02():
    """{a, b} with d(a, b) = 0.2."""
    return space_from(["a", "b"], {("a", "b"): 0.2})


@pytest.fixture
def pqr():
    """{p, q, r} with d(p, q) = 1, d(q, r) = 2, d(p, r) = 3."""
    return space_from(["p", "q", "r"], {("p", "q"): 1.0, ("q", "r"): 2.0, ("p", "r"): 3.0})


@pytest.fixture
def errs():
    """Two exceptions at distance 0.4."""
    return space_from(["e1", "e2"], {("e1", "e2"): 0.4})


@pytest.fixture
def monoid2():
    """M = {e, m} with m m = m and d(e, m) = 0.3."""
    carrier = space_from(["e", "m"], {("e", "m"): 0.3})
    return FiniteQuantAlgebra.from_functions(
        carrier,
        Signature.of({"mul": 2, "e": 0}),
        {"mul": lambda x, y: "e" if x == y == "e" else "m", "e": lambda: "e"},
        "M",
    )


@pytest.fixture
def semilattice2():
    """{0, 1} with join = max, bottom 0 and d(0, 1) = 1."""
    carrier = space_from(["0", "1"], {("0", "1"): 1.0})
    return FiniteQuantAlgebra.from_functions(
        carrier,
        Signature.of({"join": 2, "bot": 0}),
        {"join": lambda x, y: max(x, y), "bot": lambda: "0"},
        "2",
    )


@pytest.fixture(autouse=True)
def reset_logging():
    """Reset logging configuration before each test."""
    import logging
    import gc
    from src import log_setup

    # Reset the global flag
    log_setup._logger_configured = False

    # Clear existing handlers and force garbage collection
    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()

    gc.collect()

    yield

    # Cleanup after test
    log_setup._logger_configured = False

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()
    gc.collect()


@pytest.fixture
def mock_home_directory(temp_dir):
    """Point the universe cap dotfile into a temporary home directory."""
    cap_file = Path(temp_dir) / ".qalg-universe-cap"
    with patch('src.config.UNIVERSE_CAP_FILE', cap_file), \
         patch.dict(os.environ, {}, clear=False):
        os.environ.pop("QALG_UNIVERSE_CAP", None)
        yield cap_file
