"""
Models whose elements are terms: the term monad and the two eps-close operations.
"""

import logging
from typing import Hashable, List, Sequence

from ..distances import INF, ext_add, format_dist
from ..errors import EvaluationError
from ..memo import Memo
from ..presentations import two_eps_ops
from ..spaces import FinMetricSpace
from ..terms import (
    DEFAULT_UNIVERSE_CAP,
    Leaf,
    Node,
    Signature,
    Term,
    dstar,
    enumerate_universe,
    flatten,
    relabel,
)
from ..varieties import VarietyPresentation
from .base import Element, FreeAlgebraModel, PointMap

# Configure logging for this module
logger = logging.getLogger(__name__)


class TermModelBase(FreeAlgebraModel):
    """Terms over the base with tree-tupling as the operations."""

    cap: int = DEFAULT_UNIVERSE_CAP

    def unit(self, x: Hashable) -> Element:
        return Leaf(x)

    def operate(self, symbol: str, args: Sequence[Element]) -> Element:
        n = self.signature.arity(symbol) if symbol in self.signature else None
        if n is None:
            raise EvaluationError(f"Unknown operation symbol {symbol!r}")
        if n != len(args):
            raise EvaluationError(f"{symbol!r} expects {n} arguments, got {len(args)}")
        return Node(symbol, tuple(args))

    def quotient(self, term: Term) -> Element:
        return term

    def representative(self, element: Element) -> Term:
        return element

    def map_element(self, element: Element, f: PointMap, target: FreeAlgebraModel) -> Element:
        return target.quotient(relabel(element, f))

    def element_universe(self, depth: int) -> List[Element]:
        return list(enumerate_universe(self.base.points, self.signature, depth, self.cap).terms)

    @property
    def supports_multiply(self) -> bool:
        return True

    def multiply(self, element: Element) -> Element:
        return flatten(element)


class TermMonadModel(TermModelBase):
    """The free algebra of a signature without equations; distances are d*."""

    def __init__(self, base: FinMetricSpace, signature: Signature, cap: int = DEFAULT_UNIVERSE_CAP):
        super().__init__(VarietyPresentation(signature, (), "terms"), base)
        self.cap = cap

    @property
    def name(self) -> str:
        return "term"

    def distance(self, s: Element, t: Element) -> float:
        return dstar(s, t, self.base)

    def over(self, space: FinMetricSpace) -> "TermMonadModel":
        return TermMonadModel(space, self.signature, self.cap)


class TwoOpsModel(TermModelBase):
    """
    The free algebra for two binary operations sigma1, sigma2 that are eps-close.

    Distances follow the recursion: leaves as in the base, a leaf and a composite term at
    infinity, composite terms at the largest child distance m when the root symbols agree
    and at eps + m otherwise. Values are memoized.
    """

    def __init__(self, base: FinMetricSpace, eps: float, cap: int = DEFAULT_UNIVERSE_CAP):
        if not 0 < eps < 1:
            raise ValueError(f"eps must satisfy 0 < eps < 1, got {format_dist(eps)}")
        super().__init__(two_eps_ops(eps), base)
        self.eps = eps
        self.cap = cap
        self._memo: Memo[float] = Memo()

    @property
    def name(self) -> str:
        return f"two-eps-ops:{format_dist(self.eps)}"

    def distance(self, s: Element, t: Element) -> float:
        if s == t:
            return 0.0
        if isinstance(s, Leaf) and isinstance(t, Leaf):
            return self.base.dist(s.point, t.point)
        if isinstance(s, Leaf) or isinstance(t, Leaf):
            return INF
        return self._memo.get_or_compute((s, t), lambda: self._composite(s, t))

    def _composite(self, s: Node, t: Node) -> float:
        m = 0.0
        for a, b in zip(s.children, t.children):
            m = max(m, self.distance(a, b))
            if m == INF:
                return INF
        return m if s.symbol == t.symbol else ext_add(self.eps, m)

    def over(self, space: FinMetricSpace) -> "TwoOpsModel":
        return TwoOpsModel(space, self.eps, self.cap)

    def memo_stats(self):
        return self._memo.get_stats()


def term_monad(
    base: FinMetricSpace, signature: Signature, cap: int = DEFAULT_UNIVERSE_CAP
) -> TermMonadModel:
    return TermMonadModel(base, signature, cap)


def two_ops_free(base: FinMetricSpace, eps: float, cap: int = DEFAULT_UNIVERSE_CAP) -> TwoOpsModel:
    """
    Raises:
        ValueError: If eps is not strictly between 0 and 1.
    """
    return TwoOpsModel(base, eps, cap)
