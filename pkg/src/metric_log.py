"""
Logs scalar sweep values using the standard Python logging module.
"""

import logging

# Logger instance (inherits configuration from the root logger)
logger = logging.getLogger(__name__)


def log_metric(
    step: int,
    name: str,
    value: float,
) -> None:
    """
    Logs one value of a sweep (a chain stage, an eps grid point, a depth budget).

    Args:
        step: The stage, grid index or depth the value belongs to.
        name: The name of the swept quantity.
        value: The scalar value to log.
    """
    logger.info(f"Metric - Step: {step}, Name: {name}, Value: {value}")
