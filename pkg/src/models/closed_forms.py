"""
Closed-form free algebras: words, finite subsets with the Hausdorff metric, exceptions,
spaces of bounded diameter and free monoid actions.
"""

import itertools
import logging
from typing import Hashable, List, Sequence

from ..distances import INF, ext_add, format_dist
from ..errors import EvaluationError, TermSyntaxError, TruncationError
from ..presentations import action, check_monoid, exceptions, monoid, semilattice, small
from ..spaces import FinMetricSpace, coproduct
from ..terms import Leaf, Node, Term
from ..utils import split_top_level
from ..varieties import FiniteQuantAlgebra
from .base import Element, FreeAlgebraModel

# Configure logging for this module
logger = logging.getLogger(__name__)


def _right_nested(symbol: str, unit: str, parts: Sequence[Term]) -> Term:
    if not parts:
        return Node(unit, ())
    term = parts[-1]
    for part in reversed(parts[:-1]):
        term = Node(symbol, (part, term))
    return term


class WordMonoidModel(FreeAlgebraModel):
    """
    Words over the base up to a maximum length.

    Words of equal length are at the largest letterwise distance, words of different
    lengths at infinity. Concatenation beyond the maximum length raises TruncationError.
    """

    def __init__(self, base: FinMetricSpace, max_len: int):
        if max_len < 0:
            raise ValueError(f"max_len must be >= 0, got {max_len}")
        super().__init__(monoid(), base)
        self.max_len = max_len

    @property
    def name(self) -> str:
        return "word"

    def distance(self, s: Element, t: Element) -> float:
        if len(s) != len(t):
            return INF
        return max((self.base.dist(a, b) for a, b in zip(s, t)), default=0.0)

    def unit(self, x: Hashable) -> Element:
        return (x,)

    def operate(self, symbol: str, args: Sequence[Element]) -> Element:
        if symbol == "e":
            return ()
        if symbol != "mul":
            raise EvaluationError(f"Word monoid has no operation {symbol!r}")
        word = tuple(args[0]) + tuple(args[1])
        if len(word) > self.max_len:
            raise TruncationError(f"Concatenation of length {len(word)} exceeds max_len {self.max_len}")
        return word

    def representative(self, element: Element) -> Term:
        return _right_nested("mul", "e", [Leaf(x) for x in element])

    def over(self, space: FinMetricSpace) -> "WordMonoidModel":
        return WordMonoidModel(space, self.max_len)

    @property
    def supports_multiply(self) -> bool:
        return True

    def multiply(self, element: Element) -> Element:
        word = tuple(itertools.chain.from_iterable(element))
        if len(word) > self.max_len:
            raise TruncationError(f"Flattened word of length {len(word)} exceeds max_len {self.max_len}")
        return word

    def all_words(self) -> List[Element]:
        return [w for n in range(self.max_len + 1) for w in itertools.product(self.base.points, repeat=n)]

    def format_element(self, element: Element) -> str:
        return "[" + ",".join(str(x) for x in element) + "]"

    def parse_element(self, text: str) -> Element:
        """Accepts [a,b,...] or a term over mul/e."""
        text = text.strip()
        if text.startswith("["):
            if not text.endswith("]"):
                raise TermSyntaxError("Unterminated word literal", len(text))
            word = tuple(split_top_level(text[1:-1]))
            for x in word:
                if x not in self.base:
                    raise TermSyntaxError(f"Unknown point {x!r}", text.index(x))
            if len(word) > self.max_len:
                raise TruncationError(f"Word of length {len(word)} exceeds max_len {self.max_len}")
            return word
        return super().parse_element(text)


class HausdorffModel(FreeAlgebraModel):
    """All subsets of the base with the Hausdorff metric; join is union, bottom is the empty set."""

    def __init__(self, base: FinMetricSpace):
        super().__init__(semilattice(), base)

    @property
    def name(self) -> str:
        return "hausdorff"

    def distance(self, s: Element, t: Element) -> float:
        if not s and not t:
            return 0.0
        if not s or not t:
            return INF
        d = self.base.dist
        forward = max(min(d(a, b) for b in t) for a in s)
        backward = max(min(d(a, b) for a in s) for b in t)
        return max(forward, backward)

    def unit(self, x: Hashable) -> Element:
        return frozenset((x,))

    def operate(self, symbol: str, args: Sequence[Element]) -> Element:
        if symbol == "bot":
            return frozenset()
        if symbol != "join":
            raise EvaluationError(f"Semilattice has no operation {symbol!r}")
        return frozenset(args[0]) | frozenset(args[1])

    def _ordered(self, element: Element) -> List[Hashable]:
        return [p for p in self.base.points if p in element]

    def representative(self, element: Element) -> Term:
        return _right_nested("join", "bot", [Leaf(x) for x in self._ordered(element)])

    def over(self, space: FinMetricSpace) -> "HausdorffModel":
        return HausdorffModel(space)

    @property
    def supports_multiply(self) -> bool:
        return True

    def multiply(self, element: Element) -> Element:
        return frozenset(itertools.chain.from_iterable(element))

    def all_subsets(self) -> List[Element]:
        pts = self.base.points
        return [frozenset(c) for n in range(len(pts) + 1) for c in itertools.combinations(pts, n)]

    def format_element(self, element: Element) -> str:
        return "{" + ",".join(str(x) for x in self._ordered(element)) + "}"

    def parse_element(self, text: str) -> Element:
        """Accepts {p,q,...} or a term over join/bot."""
        text = text.strip()
        if text.startswith("{"):
            if not text.endswith("}"):
                raise TermSyntaxError("Unterminated set literal", len(text))
            members = split_top_level(text[1:-1])
            for x in members:
                if x not in self.base:
                    raise TermSyntaxError(f"Unknown point {x!r}", text.index(x))
            return frozenset(members)
        return super().parse_element(text)


class ExceptionModel(FreeAlgebraModel):
    """
    The coproduct of the base and the exception space: points tagged (0, x), exceptions
    tagged (1, e), at infinity across the two summands.
    """

    def __init__(self, base: FinMetricSpace, errors: FinMetricSpace):
        super().__init__(exceptions(errors), base)
        self.errors = errors
        self.carrier = coproduct([base, errors])

    @property
    def name(self) -> str:
        return "exception"

    def distance(self, s: Element, t: Element) -> float:
        return self.carrier.dist(s, t)

    def unit(self, x: Hashable) -> Element:
        return (0, x)

    def operate(self, symbol: str, args: Sequence[Element]) -> Element:
        if symbol not in self.errors:
            raise EvaluationError(f"Exception model has no constant {symbol!r}")
        return (1, symbol)

    def representative(self, element: Element) -> Term:
        return Leaf(element[1]) if element[0] == 0 else Node(element[1], ())

    def over(self, space: FinMetricSpace) -> "ExceptionModel":
        return ExceptionModel(space, self.errors)

    @property
    def supports_multiply(self) -> bool:
        return True

    def multiply(self, element: Element) -> Element:
        # (0, inner) carries an element of T X; raised exceptions stay raised
        return element[1] if element[0] == 0 else element


class SmallSpaceModel(FreeAlgebraModel):
    """
    The free space of diameter eps on the base: same points, distinct points at
    max(d, eps) (bound="max") or min(d, eps) (bound="min").
    """

    def __init__(self, base: FinMetricSpace, eps: float, bound: str = "max"):
        if bound not in ("max", "min"):
            raise ValueError(f"bound must be 'max' or 'min', got {bound!r}")
        super().__init__(small(eps), base)
        self.eps = eps
        self.bound = bound

    @property
    def name(self) -> str:
        return f"small:{format_dist(self.eps)}"

    def distance(self, s: Element, t: Element) -> float:
        if s == t:
            return 0.0
        d = self.base.dist(s, t)
        return max(d, self.eps) if self.bound == "max" else min(d, self.eps)

    def unit(self, x: Hashable) -> Element:
        return x

    def operate(self, symbol: str, args: Sequence[Element]) -> Element:
        raise EvaluationError(f"Spaces of bounded diameter have no operation {symbol!r}")

    def representative(self, element: Element) -> Term:
        return Leaf(element)

    def over(self, space: FinMetricSpace) -> "SmallSpaceModel":
        return SmallSpaceModel(space, self.eps, self.bound)

    @property
    def supports_multiply(self) -> bool:
        return True

    def multiply(self, element: Element) -> Element:
        return element

    @property
    def space(self) -> FinMetricSpace:
        return self.as_space(self.base.points)


class ActionModel(FreeAlgebraModel):
    """
    The free action of a finite quantitative monoid M: pairs (m, x) with m(m', x) = (m m', x).

    metric="max" gives the product metric of M and the base; metric="sum" the sum metric.
    """

    def __init__(self, monoid_algebra: FiniteQuantAlgebra, base: FinMetricSpace, metric: str = "max"):
        if metric not in ("max", "sum"):
            raise ValueError(f"metric must be 'max' or 'sum', got {metric!r}")
        check_monoid(monoid_algebra)
        super().__init__(action(monoid_algebra), base)
        self.monoid = monoid_algebra
        self.metric = metric
        self._by_symbol = {str(p): p for p in monoid_algebra.points}
        self._unit = monoid_algebra.operate("e", ())

    @property
    def name(self) -> str:
        return f"action:{self.metric}"

    def distance(self, s: Element, t: Element) -> float:
        dm = self.monoid.dist(s[0], t[0])
        dx = self.base.dist(s[1], t[1])
        return max(dm, dx) if self.metric == "max" else ext_add(dm, dx)

    def unit(self, x: Hashable) -> Element:
        return (self._unit, x)

    def operate(self, symbol: str, args: Sequence[Element]) -> Element:
        m = self._by_symbol.get(symbol)
        if m is None:
            raise EvaluationError(f"Action has no operation {symbol!r}")
        inner, x = args[0]
        return (self.monoid.operate("mul", (m, inner)), x)

    def representative(self, element: Element) -> Term:
        m, x = element
        if m == self._unit:
            return Leaf(x)
        return Node(str(m), (Leaf(x),))

    def over(self, space: FinMetricSpace) -> "ActionModel":
        return ActionModel(self.monoid, space, self.metric)

    @property
    def supports_multiply(self) -> bool:
        return True

    def multiply(self, element: Element) -> Element:
        m, (inner, x) = element
        return (self.monoid.operate("mul", (m, inner)), x)

    def format_element(self, element: Element) -> str:
        return f"({element[0]},{element[1]})"


def word_monoid(base: FinMetricSpace, max_len: int) -> WordMonoidModel:
    return WordMonoidModel(base, max_len)


def finite_hausdorff(base: FinMetricSpace) -> HausdorffModel:
    return HausdorffModel(base)


def exception_monad(base: FinMetricSpace, errors: FinMetricSpace) -> ExceptionModel:
    return ExceptionModel(base, errors)


def small_space_monad(base: FinMetricSpace, eps: float, bound: str = "max") -> SmallSpaceModel:
    return SmallSpaceModel(base, eps, bound)


def monoid_action_monad(
    monoid_algebra: FiniteQuantAlgebra, base: FinMetricSpace, metric: str = "max"
) -> ActionModel:
    """
    Raises:
        PreconditionError: If the monoid fails the monoid laws or has an expanding operation.
    """
    return ActionModel(monoid_algebra, base, metric)
