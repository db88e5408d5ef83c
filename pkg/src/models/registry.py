"""
Picks the free-algebra model for a resolved variety.
"""

import logging
from typing import Any

from ..errors import PreconditionError
from ..presentations import ResolvedVariety
from ..spaces import FinMetricSpace, discrete
from ..terms import DEFAULT_UNIVERSE_CAP
from .base import FreeAlgebraModel
from .closed_forms import (
    exception_monad,
    finite_hausdorff,
    monoid_action_monad,
    small_space_monad,
    word_monoid,
)
from .generic import monoid_oracle, oracle_for, ordinary_free, semilattice_oracle, unary_free
from .term_models import term_monad, two_ops_free

# Configure logging for this module
logger = logging.getLogger(__name__)

CONSTRUCTIONS = ("closed", "generic")

MODEL_ALIASES = {"word": "monoid", "hausdorff": "semilattice"}


def build_model(
    variety: ResolvedVariety,
    space: FinMetricSpace,
    construction: str = "closed",
    max_depth: int = 3,
    max_len: int = 3,
    action_metric: str = "max",
    small_bound: str = "max",
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> FreeAlgebraModel:
    """
    Builds the closed-form or the generic model of a variety over a space.

    Args:
        variety: Output of resolve_variety.
        space: The base space.
        construction: "closed" for the closed forms, "generic" for the bounded constructions.
        max_depth: Depth budget of generic constructions.
        max_len: Word length bound of the word monoid.
        action_metric: "max" or "sum" for the action closed form.
        small_bound: "max" or "min" for the bounded-diameter closed form.
        cap: Term-universe size guard.

    Raises:
        ValueError: On an unknown construction name.
        PreconditionError: If no construction applies to the presentation.
    """
    if construction not in CONSTRUCTIONS:
        raise ValueError(f"Invalid construction: {construction}")
    kind = variety.kind
    presentation = variety.presentation
    generic = construction == "generic"
    logger.debug(f"Building {construction} model for {kind} over {len(space)} points")

    if kind == "monoid":
        if generic:
            return ordinary_free(presentation, space, monoid_oracle(), max_depth, cap)
        return word_monoid(space, max_len)
    if kind == "semilattice":
        if generic:
            return ordinary_free(presentation, space, semilattice_oracle(), max_depth, cap)
        return finite_hausdorff(space)
    if kind == "two-eps-ops":
        return two_ops_free(space, variety.eps, cap)
    if kind == "action" and not generic:
        return monoid_action_monad(variety.monoid, space, action_metric)
    if kind == "small" and not generic:
        return small_space_monad(space, variety.eps, small_bound)
    if kind == "exceptions" and not generic:
        return exception_monad(space, variety.exceptions)
    if kind in ("action", "small", "exceptions"):
        return unary_free(presentation, space, max_depth, cap)

    if not presentation.equations and not generic:
        return term_monad(space, presentation.signature, cap)
    if presentation.is_ordinary:
        return ordinary_free(presentation, space, oracle_for(presentation), max_depth, cap)
    if presentation.signature.max_arity <= 1:
        return unary_free(presentation, space, max_depth, cap)
    raise PreconditionError(
        f"No construction for {presentation.label!r}: equations with eps > 0 need operations of arity <= 1"
    )


def build_model_pair(variety: ResolvedVariety, space: FinMetricSpace, **options: Any):
    """The model over the discrete space on the points of space, and the model over space."""
    return build_model(variety, discrete(space.points), **options), build_model(variety, space, **options)
