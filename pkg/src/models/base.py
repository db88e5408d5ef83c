"""
Base interface for realized free-algebra models.

A model is the free algebra of a variety on a finite base space, in some concrete
representation: a closed form, the term algebra itself, or a bounded generic construction.
"""

import itertools
import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, Hashable, List, Mapping, Sequence, Union

import numpy as np

from ..errors import TruncationError
from ..spaces import FinMetricSpace
from ..terms import Term, evaluate, format_term, parse_term, relabel
from ..varieties import VarietyPresentation

# Configure logging for this module
logger = logging.getLogger(__name__)

Element = Hashable
PointMap = Union[Mapping[Hashable, Hashable], Callable[[Hashable], Hashable]]


class FreeAlgebraModel(ABC):
    """
    Abstract base class for free-algebra models.

    Subclasses supply the element distance, the unit and the operations; the canonical
    quotient from terms, the action on maps and element universes are derived from these.
    """

    def __init__(self, presentation: VarietyPresentation, base: FinMetricSpace):
        """
        Initialize the model.

        Args:
            presentation: The variety this model is free in
            base: The space of generators
        """
        self.presentation = presentation
        self.base = base

    @property
    @abstractmethod
    def name(self) -> str:
        """Short name of this construction."""
        raise NotImplementedError("Subclasses must implement name")

    @abstractmethod
    def distance(self, s: Element, t: Element) -> float:
        """
        Distance of two elements.

        Raises:
            NotImplementedError: Must be implemented by subclasses
        """
        raise NotImplementedError("Subclasses must implement distance()")

    @abstractmethod
    def unit(self, x: Hashable) -> Element:
        """The generator element for a base point."""
        raise NotImplementedError("Subclasses must implement unit()")

    @abstractmethod
    def operate(self, symbol: str, args: Sequence[Element]) -> Element:
        """
        Applies an operation of the signature.

        Raises:
            TruncationError: If a bounded model cannot represent the result
        """
        raise NotImplementedError("Subclasses must implement operate()")

    @abstractmethod
    def representative(self, element: Element) -> Term:
        """A term over the base whose quotient is the element."""
        raise NotImplementedError("Subclasses must implement representative()")

    @abstractmethod
    def over(self, space: FinMetricSpace) -> "FreeAlgebraModel":
        """The same construction on another base space."""
        raise NotImplementedError("Subclasses must implement over()")

    # --- Derived structure ---

    @property
    def signature(self):
        return self.presentation.signature

    def dist(self, s: Element, t: Element) -> float:
        return self.distance(s, t)

    def quotient(self, term: Term) -> Element:
        """The canonical quotient T_Sigma X -> T X: structural evaluation of the term."""
        return evaluate(term, self, self.unit)

    @property
    def identity_carried(self) -> bool:
        """True when the comparison from the model over |X| is the identity on elements."""
        return True

    @property
    def supports_multiply(self) -> bool:
        return False

    def multiply(self, element: Element) -> Element:
        """
        The monad multiplication on an element of the model over this model's elements.

        Raises:
            NotImplementedError: For constructions without a materialized multiplication
        """
        raise NotImplementedError(f"{self.name} does not materialize the multiplication")

    def map_element(self, element: Element, f: PointMap, target: "FreeAlgebraModel") -> Element:
        """T f: relabels a representative and takes its quotient in the target model."""
        return target.quotient(relabel(self.representative(element), f))

    def parse_element(self, text: str) -> Element:
        """Parses an s-expression over the base and returns its quotient."""
        return self.quotient(parse_term(text, self.signature, self.base.points))

    def format_element(self, element: Element) -> str:
        return format_term(self.representative(element))

    def element_universe(self, depth: int) -> List[Element]:
        """
        Elements denoted by terms of depth <= depth, in generation order.

        Operations whose result cannot be represented are skipped.
        """
        level0: List[Element] = [self.unit(x) for x in self.base.points]
        for c in self.signature.constants:
            level0.append(self.operate(c, ()))
        seen: Dict[Element, None] = dict.fromkeys(level0)
        previous = list(seen)
        for _ in range(depth):
            current: Dict[Element, None] = dict.fromkeys(level0)
            for symbol, n in self.signature.ops:
                if n == 0:
                    continue
                for args in itertools.product(previous, repeat=n):
                    try:
                        current.setdefault(self.operate(symbol, args), None)
                    except TruncationError:
                        continue
            previous = list(current)
            for e in previous:
                seen.setdefault(e, None)
        return list(seen)

    def distance_table(self, elements: Sequence[Element]) -> np.ndarray:
        n = len(elements)
        table = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                table[i, j] = table[j, i] = self.distance(elements[i], elements[j])
        return table

    def as_space(self, elements: Sequence[Element]) -> FinMetricSpace:
        """The given elements as a finite metric space (for building T over T X)."""
        return FinMetricSpace(tuple(elements), self.distance_table(elements), validate=False)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name}, {len(self.base)} points)"


class CongruenceOracle(ABC):
    """Decides the congruence of an ordinary presentation through normal forms."""

    @property
    @abstractmethod
    def name(self) -> str:
        raise NotImplementedError("Subclasses must implement name")

    @abstractmethod
    def normal_form(self, term: Term) -> Term:
        """An idempotent normal form; congruent terms have equal normal forms."""
        raise NotImplementedError("Subclasses must implement normal_form()")

    def congruent(self, s: Term, t: Term) -> bool:
        return self.normal_form(s) == self.normal_form(t)
