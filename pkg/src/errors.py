"""
Exception types shared across the package.
"""

from typing import Optional


class MetricValidationError(ValueError):
    """A distance table violates a (pseudo)metric axiom."""


class ChainValidationError(ValueError):
    """A directed chain has a missing or expanding link."""


class TermSyntaxError(ValueError):
    """An s-expression could not be parsed into a term."""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class ArityError(ValueError):
    """A symbol was applied to the wrong number of arguments."""


class UniverseCapExceeded(RuntimeError):
    """A term or element universe would exceed the configured size cap."""

    def __init__(self, projected: int, cap: int, what: str = "term universe"):
        self.projected = projected
        self.cap = cap
        super().__init__(
            f"Refusing to build {what}: projected size {projected} exceeds cap {cap}. "
            "Raise the cap with QALG_UNIVERSE_CAP or lower the depth."
        )


class EvaluationError(ValueError):
    """A term could not be evaluated in an algebra."""


class TruncationError(RuntimeError):
    """A bounded model was asked for an element beyond its truncation."""


class PreconditionError(ValueError):
    """A probe was run on inputs outside its documented preconditions."""
