"""
Extended distances: nonnegative floats with infinity admitted.
"""

import math
from typing import Iterable, Union

INF = math.inf

# Absolute tolerance for comparisons of computed (non-exact) distances.
TOLERANCE = 1e-12

# Margin a strict-inequality witness must clear before it is reported.
WITNESS_MARGIN = 1e-9

DistLike = Union[int, float, str]


def ext_add(x: float, y: float) -> float:
    """Infinity-absorbing sum."""
    if math.isinf(x) or math.isinf(y):
        return INF
    return x + y


def ext_sum(values: Iterable[float]) -> float:
    total = 0.0
    for v in values:
        total = ext_add(total, v)
    return total


def ext_max(values: Iterable[float]) -> float:
    """Maximum with the empty maximum equal to 0."""
    return max(values, default=0.0)


def ext_min(values: Iterable[float]) -> float:
    """Minimum with the empty minimum equal to infinity."""
    return min(values, default=INF)


def parse_dist(value: DistLike) -> float:
    """
    Parses a distance from JSON or command-line input.

    Args:
        value: A number, or one of the strings "inf", "infinity", "∞", or a numeric string.

    Returns:
        The distance as a float.

    Raises:
        ValueError: If the value is negative, NaN or not a distance.
    """
    if isinstance(value, bool):
        raise ValueError(f"Invalid distance: {value!r}")
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "∞", "+inf"):
            return INF
        try:
            result = float(text)
        except ValueError:
            raise ValueError(f"Invalid distance: {value!r}") from None
    elif isinstance(value, (int, float)):
        result = float(value)
    else:
        raise ValueError(f"Invalid distance: {value!r}")

    if math.isnan(result) or result < 0:
        raise ValueError(f"Distance must be nonnegative, got {value!r}")
    return result


def format_dist(value: float) -> str:
    """Text form used in every report: 'inf' or the shortest exact float repr."""
    if math.isinf(value):
        return "inf"
    if value == int(value) and abs(value) < 1e15:
        return repr(float(value))
    return repr(value)


def dist_to_json(value: float) -> Union[float, str]:
    """JSON has no infinity, so it is written as the string 'inf'."""
    return "inf" if math.isinf(value) else float(value)


def leq(x: float, y: float, tol: float = TOLERANCE) -> bool:
    """x <= y up to an absolute tolerance; infinities compare exactly."""
    if math.isinf(y):
        return True
    if math.isinf(x):
        return False
    return x <= y + tol


def close(x: float, y: float, tol: float = TOLERANCE) -> bool:
    if math.isinf(x) or math.isinf(y):
        return x == y
    return abs(x - y) <= tol
