"""
Generic bounded constructions of free algebras.

ordinary_free handles presentations whose equations are all ordinary (eps = 0) given a
congruence oracle; unary_free handles signatures of arity at most 1 with arbitrary bounds.
Both compute on a depth-bounded universe and take the metric reflection; the distances are
upper bounds on the true free metric that can only decrease as the depth grows.
"""

import itertools
import logging
from typing import Dict, Hashable, List, Sequence, Tuple

import numpy as np

from ..closure import MetricReflection, meet, metric_reflection, shortest_path_closure
from ..distances import INF
from ..entailment import entailment_pseudometric
from ..errors import EvaluationError, PreconditionError, TruncationError, UniverseCapExceeded
from ..memo import Memo
from ..metric_log import log_metric
from ..spaces import FinPseudoSpace, FinMetricSpace
from ..terms import (
    DEFAULT_UNIVERSE_CAP,
    Leaf,
    Node,
    Term,
    count_terms,
    dstar,
    enumerate_universe,
    format_term,
)
from ..varieties import VarietyPresentation
from .base import CongruenceOracle, Element, FreeAlgebraModel

# Configure logging for this module
logger = logging.getLogger(__name__)


# --- Congruence oracles ---


def _right_nested(symbol: str, unit: str, parts: Sequence[Term]) -> Term:
    if not parts:
        return Node(unit, ())
    term = parts[-1]
    for part in reversed(parts[:-1]):
        term = Node(symbol, (part, term))
    return term


class TrivialOracle(CongruenceOracle):
    """Syntactic equality; sound and complete only for presentations without equations."""

    @property
    def name(self) -> str:
        return "trivial"

    def normal_form(self, term: Term) -> Term:
        return term


class MonoidOracle(CongruenceOracle):
    """Flattens to the word of leaves with units erased, rebuilt right-nested."""

    def __init__(self, mul: str = "mul", unit: str = "e"):
        self.mul = mul
        self.unit = unit

    @property
    def name(self) -> str:
        return "monoid"

    def word(self, term: Term) -> List[Term]:
        if isinstance(term, Leaf):
            return [term]
        if term.symbol == self.unit:
            return []
        if term.symbol == self.mul:
            return self.word(term.children[0]) + self.word(term.children[1])
        raise EvaluationError(f"Monoid oracle cannot normalize symbol {term.symbol!r}")

    def normal_form(self, term: Term) -> Term:
        return _right_nested(self.mul, self.unit, self.word(term))


class SemilatticeOracle(CongruenceOracle):
    """Flattens to the set of leaves, rebuilt as a right-nested join in a fixed order."""

    def __init__(self, join: str = "join", bottom: str = "bot"):
        self.join = join
        self.bottom = bottom

    @property
    def name(self) -> str:
        return "semilattice"

    def leaf_set(self, term: Term) -> set:
        if isinstance(term, Leaf):
            return {term}
        if term.symbol == self.bottom:
            return set()
        if term.symbol == self.join:
            return self.leaf_set(term.children[0]) | self.leaf_set(term.children[1])
        raise EvaluationError(f"Semilattice oracle cannot normalize symbol {term.symbol!r}")

    def normal_form(self, term: Term) -> Term:
        ordered = sorted(self.leaf_set(term), key=lambda leaf: repr(leaf.point))
        return _right_nested(self.join, self.bottom, ordered)


def trivial_oracle() -> TrivialOracle:
    return TrivialOracle()


def monoid_oracle() -> MonoidOracle:
    return MonoidOracle()


def semilattice_oracle() -> SemilatticeOracle:
    return SemilatticeOracle()


def check_oracle(oracle: CongruenceOracle, variety: VarietyPresentation) -> None:
    """
    Verifies that both sides of every equation normalize alike and that normal forms are idempotent.

    Raises:
        PreconditionError: Naming the first equation the oracle does not identify.
    """
    for eq in variety.equations:
        try:
            left, right = oracle.normal_form(eq.lhs), oracle.normal_form(eq.rhs)
        except EvaluationError as e:
            raise PreconditionError(f"Oracle {oracle.name!r} cannot handle {eq}: {e}") from e
        if left != right:
            raise PreconditionError(
                f"Oracle {oracle.name!r} does not identify the sides of {eq}: "
                f"{format_term(left)} vs {format_term(right)}"
            )
        for nf in (left, right):
            if oracle.normal_form(nf) != nf:
                raise PreconditionError(f"Oracle {oracle.name!r} is not idempotent on {format_term(nf)}")


# --- Ordinary presentations ---


class ReflectedModelBase(FreeAlgebraModel):
    """Elements are class labels of a metric reflection over a bounded term set."""

    reflection: MetricReflection
    max_depth: int

    def distance(self, s: Element, t: Element) -> float:
        return self.reflection.space.dist(s, t)

    def representative(self, element: Element) -> Term:
        return element

    def unit(self, x: Hashable) -> Element:
        return self.quotient(Leaf(x))

    @property
    def elements(self) -> Tuple[Element, ...]:
        return self.reflection.space.points

    def _truncated(self, term: Term) -> TruncationError:
        return TruncationError(
            f"Term {format_term(term)} is outside the depth-{self.max_depth} universe of {self.name}"
        )


class OrdinaryFreeModel(ReflectedModelBase):
    """
    Free algebra of an ordinary presentation on a depth-bounded universe.

    For each depth level the smallest d* over similar pairs of terms is kept per pair of
    congruence classes; the shortest-path closure over classes then lets chains step freely
    between congruent terms and pay d* between similar ones.
    """

    def __init__(
        self,
        presentation: VarietyPresentation,
        base: FinMetricSpace,
        oracle: CongruenceOracle,
        max_depth: int,
        cap: int = DEFAULT_UNIVERSE_CAP,
    ):
        if not presentation.is_ordinary:
            bad = next(eq for eq in presentation.equations if not eq.is_ordinary)
            raise PreconditionError(f"Non-ordinary equation present: {bad}")
        if max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {max_depth}")
        check_oracle(oracle, presentation)
        projected = count_terms(len(base), presentation.signature, max_depth)
        if projected > cap:
            raise UniverseCapExceeded(projected, cap)
        super().__init__(presentation, base)
        self.oracle = oracle
        self.max_depth = max_depth
        self.cap = cap
        self._nf: Memo[Term] = Memo()
        self.class_order, self.pair_bounds = self._class_pair_bounds()
        self.reflection = self._reflect()

    @property
    def name(self) -> str:
        return f"ordinary:{self.presentation.label}"

    def _apply(self, symbol: str, classes: Tuple[Term, ...]) -> Term:
        key = (symbol, classes)
        return self._nf.get_or_compute(key, lambda: self.oracle.normal_form(Node(symbol, classes)))

    def _class_pair_bounds(self) -> Tuple[List[Term], Dict[Tuple[Term, Term], float]]:
        order: Dict[Term, None] = {}
        base_bounds: Dict[Tuple[Term, Term], float] = {}
        leaf_class = {x: self.oracle.normal_form(Leaf(x)) for x in self.base.points}
        for x in self.base.points:
            order.setdefault(leaf_class[x], None)
        for x, y in itertools.product(self.base.points, repeat=2):
            key = (leaf_class[x], leaf_class[y])
            base_bounds[key] = min(base_bounds.get(key, INF), self.base.dist(x, y))
        for c in self.signature.constants:
            cls = self.oracle.normal_form(Node(c, ()))
            order.setdefault(cls, None)
            base_bounds[(cls, cls)] = 0.0

        bounds = dict(base_bounds)
        for k in range(1, self.max_depth + 1):
            previous = list(bounds.items())
            current = dict(base_bounds)
            for symbol, n in self.signature.ops:
                if n == 0:
                    continue
                for combo in itertools.product(previous, repeat=n):
                    left = self._apply(symbol, tuple(pair[0] for pair, _ in combo))
                    right = self._apply(symbol, tuple(pair[1] for pair, _ in combo))
                    value = max(v for _, v in combo)
                    key = (left, right)
                    if value < current.get(key, INF):
                        current[key] = value
                    order.setdefault(left, None)
                    order.setdefault(right, None)
            bounds = current
            log_metric(k, f"{self.name}.classes", len({a for a, _ in bounds}))
        return list(order), bounds

    def _reflect(self) -> MetricReflection:
        realized = {a for a, _ in self.pair_bounds}
        classes = [c for c in self.class_order if c in realized]
        self.class_order = classes
        index = {c: i for i, c in enumerate(classes)}
        weights = np.full((len(classes), len(classes)), INF)
        for (a, b), v in self.pair_bounds.items():
            i, j = index[a], index[b]
            weights[i, j] = min(weights[i, j], v)
            weights[j, i] = min(weights[j, i], v)
        closed = shortest_path_closure(weights)
        reflection = metric_reflection(FinPseudoSpace(tuple(classes), closed, validate=False))
        logger.info(
            f"{self.name} over {len(self.base)} points at depth {self.max_depth}: "
            f"{len(classes)} classes, {len(reflection.space)} elements"
        )
        return reflection

    def quotient(self, term: Term) -> Element:
        nf = self.oracle.normal_form(term)
        if nf not in self.reflection.quotient:
            raise self._truncated(term)
        return self.reflection.quotient[nf]

    def operate(self, symbol: str, args: Sequence[Element]) -> Element:
        if symbol not in self.signature:
            raise EvaluationError(f"Unknown operation symbol {symbol!r}")
        nf = self._apply(symbol, tuple(args))
        if nf not in self.reflection.quotient:
            raise self._truncated(Node(symbol, tuple(args)))
        return self.reflection.quotient[nf]

    def over(self, space: FinMetricSpace) -> "OrdinaryFreeModel":
        return OrdinaryFreeModel(self.presentation, space, self.oracle, self.max_depth, self.cap)


# --- Unary presentations ---


class UnaryFreeModel(ReflectedModelBase):
    """
    Free algebra of a presentation with operations of arity at most 1.

    On the depth-bounded universe the term metric d* is met with the rewrite-chain bound on
    entailment, and the result is reflected to a metric.
    """

    def __init__(
        self,
        presentation: VarietyPresentation,
        base: FinMetricSpace,
        max_depth: int,
        cap: int = DEFAULT_UNIVERSE_CAP,
    ):
        if presentation.signature.max_arity > 1:
            wide = next(s for s, n in presentation.signature.ops if n > 1)
            raise PreconditionError(f"Operation {wide!r} has arity > 1")
        super().__init__(presentation, base)
        self.max_depth = max_depth
        self.cap = cap
        self.universe = enumerate_universe(base.points, presentation.signature, max_depth, cap)
        terms = self.universe.terms
        n = len(terms)
        star = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                star[i, j] = star[j, i] = dstar(terms[i], terms[j], base)
        entailed = entailment_pseudometric(presentation, self.universe)
        met = meet(FinPseudoSpace(terms, star, validate=False), entailed)
        self.reflection = metric_reflection(met)
        logger.info(
            f"{self.name} over {len(base)} points at depth {max_depth}: "
            f"{n} terms, {len(self.reflection.space)} elements"
        )

    @property
    def name(self) -> str:
        return f"unary:{self.presentation.label}"

    def quotient(self, term: Term) -> Element:
        if term not in self.reflection.quotient:
            raise self._truncated(term)
        return self.reflection.quotient[term]

    def operate(self, symbol: str, args: Sequence[Element]) -> Element:
        if symbol not in self.signature:
            raise EvaluationError(f"Unknown operation symbol {symbol!r}")
        return self.quotient(Node(symbol, tuple(args)))

    def over(self, space: FinMetricSpace) -> "UnaryFreeModel":
        return UnaryFreeModel(self.presentation, space, self.max_depth, self.cap)


def ordinary_free(
    presentation: VarietyPresentation,
    base: FinMetricSpace,
    oracle: CongruenceOracle,
    max_depth: int,
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> OrdinaryFreeModel:
    """
    Raises:
        PreconditionError: If an equation is not ordinary or the oracle fails its check.
        UniverseCapExceeded: If the term universe of the given depth exceeds the cap.
    """
    return OrdinaryFreeModel(presentation, base, oracle, max_depth, cap)


def unary_free(
    presentation: VarietyPresentation,
    base: FinMetricSpace,
    max_depth: int,
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> UnaryFreeModel:
    """
    Raises:
        PreconditionError: If an operation has arity greater than 1.
        UniverseCapExceeded: If the term universe exceeds the cap.
    """
    return UnaryFreeModel(presentation, base, max_depth, cap)


def oracle_for(presentation: VarietyPresentation) -> CongruenceOracle:
    """The shipped oracle matching a presentation's signature."""
    symbols = set(presentation.signature.symbols)
    if symbols == {"mul", "e"}:
        return monoid_oracle()
    if symbols == {"join", "bot"}:
        return semilattice_oracle()
    if not presentation.equations:
        return trivial_oracle()
    raise PreconditionError(
        f"No shipped congruence oracle for {presentation.label!r}; only monoid and semilattice "
        "presentations (or presentations without equations) are supported"
    )
