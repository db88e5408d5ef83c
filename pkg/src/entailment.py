"""
Sound upper bounds on quantitative entailment by single-step rewriting.

Within a depth-bounded term universe, s and s' are joined by an edge of weight eps when s'
arises from s by replacing one subterm that is an instance of one side of an equation
u =_eps u' with the matching instance of the other side. Every algebra of the variety has
nonexpanding operations, so each step moves evaluations by at most eps and shortest paths
bound the entailed distance from above.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Hashable, Iterator, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .distances import INF, format_dist
from .spaces import FinPseudoSpace
from .terms import (
    DEFAULT_UNIVERSE_CAP,
    Leaf,
    Node,
    Term,
    TermUniverse,
    enumerate_universe,
    format_term,
    instantiate,
    leaves,
)
from .varieties import QuantEquation, VarietyPresentation

# Configure logging for this module
logger = logging.getLogger(__name__)

Position = Tuple[int, ...]


def positions(t: Term) -> Iterator[Tuple[Position, Term]]:
    """All (position, subterm) pairs in pre-order."""
    yield (), t
    if isinstance(t, Node):
        for k, c in enumerate(t.children):
            for pos, sub in positions(c):
                yield (k,) + pos, sub


def replace_at(t: Term, pos: Position, replacement: Term) -> Term:
    if not pos:
        return replacement
    assert isinstance(t, Node)
    k = pos[0]
    children = list(t.children)
    children[k] = replace_at(children[k], pos[1:], replacement)
    return Node(t.symbol, tuple(children))


def match(pattern: Term, t: Term, variables: Sequence[str], bound: Optional[Dict[str, Term]] = None) -> Optional[Dict[str, Term]]:
    """
    Matches a pattern whose variable leaves may stand for any subterm.

    Repeated variables must match equal subterms. Returns the substitution or None.
    """
    subst = dict(bound or {})
    if isinstance(pattern, Leaf) and pattern.point in variables:
        seen = subst.get(pattern.point)
        if seen is None:
            subst[pattern.point] = t
            return subst
        return subst if seen == t else None
    if isinstance(pattern, Leaf):
        return subst if pattern == t else None
    if not isinstance(t, Node) or t.symbol != pattern.symbol or len(t.children) != len(pattern.children):
        return None
    for p, c in zip(pattern.children, t.children):
        subst = match(p, c, variables, subst)
        if subst is None:
            return None
    return subst


def one_step_rewrites(
    t: Term, equations: Sequence[QuantEquation], universe: TermUniverse
) -> Iterator[Tuple[Term, float]]:
    """
    Yields (s', eps) for every single rewrite of t that stays inside the universe.

    Variables occurring only on the produced side range over the whole universe.
    """
    for pos, sub in positions(t):
        for eq in equations:
            for lhs, rhs in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
                subst = match(lhs, sub, eq.variables)
                if subst is None:
                    continue
                free = [v for v in dict.fromkeys(leaves(rhs)) if v in eq.variables and v not in subst]
                for values in itertools.product(universe.terms, repeat=len(free)):
                    full = dict(subst)
                    full.update(zip(free, values))
                    result = replace_at(t, pos, instantiate(rhs, full))
                    if result in universe:
                        yield result, eq.eps


@dataclass(frozen=True)
class EntailmentBound:
    """An upper bound with the rewrite chain realizing it (None when unreachable)."""

    value: float
    chain: Optional[Tuple[Term, ...]]
    costs: Optional[Tuple[float, ...]]


class RewriteGraph:
    """The weighted single-rewrite graph of a presentation over a term universe."""

    def __init__(self, variety: VarietyPresentation, universe: TermUniverse):
        self.variety = variety
        self.universe = universe
        self.graph = nx.Graph()
        self.graph.add_nodes_from(range(len(universe)))
        for i, t in enumerate(universe.terms):
            for s, eps in one_step_rewrites(t, variety.equations, universe):
                j = universe.index_of(s)
                if i == j:
                    continue
                current = self.graph.get_edge_data(i, j)
                if current is None or eps < current["weight"]:
                    self.graph.add_edge(i, j, weight=eps)
        logger.debug(
            f"Rewrite graph for {variety.label}: {self.graph.number_of_nodes()} terms, "
            f"{self.graph.number_of_edges()} edges"
        )

    def _indices(self, t: Term, u: Term) -> Tuple[int, int]:
        for term in (t, u):
            if term not in self.universe:
                raise ValueError(
                    f"Term {format_term(term)} lies outside the rewrite universe of depth "
                    f"{self.universe.max_depth}"
                )
        return self.universe.index_of(t), self.universe.index_of(u)

    def chain(self, t: Term, u: Term) -> EntailmentBound:
        i, j = self._indices(t, u)
        if i == j:
            return EntailmentBound(0.0, (t,), ())
        try:
            length, path = nx.single_source_dijkstra(self.graph, i, j, weight="weight")
        except nx.NetworkXNoPath:
            return EntailmentBound(INF, None, None)
        costs = tuple(float(self.graph[a][b]["weight"]) for a, b in zip(path, path[1:]))
        return EntailmentBound(float(length), tuple(self.universe.terms[k] for k in path), costs)

    def bound(self, t: Term, u: Term) -> float:
        return self.chain(t, u).value

    def pseudometric(self) -> FinPseudoSpace:
        """All bounds on the universe at once."""
        n = len(self.universe)
        if n == 0:
            return FinPseudoSpace((), np.zeros((0, 0)), validate=False)
        matrix = nx.floyd_warshall_numpy(self.graph, nodelist=list(range(n)), weight="weight")
        return FinPseudoSpace(self.universe.terms, np.asarray(matrix, dtype=float), validate=False)


def rewrite_universe(
    variety: VarietyPresentation, base: Sequence[Hashable], max_depth: int, cap: int = DEFAULT_UNIVERSE_CAP
) -> TermUniverse:
    return enumerate_universe(base, variety.signature, max_depth, cap)


def entailment_chain(
    variety: VarietyPresentation,
    t: Term,
    u: Term,
    base: Sequence[Hashable],
    max_depth: int,
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> EntailmentBound:
    """
    Shortest rewrite chain from t to u in the universe of the given depth over base.

    Raises:
        UniverseCapExceeded: If the universe would exceed the cap.
        ValueError: If t or u lies outside the universe.
    """
    graph = RewriteGraph(variety, rewrite_universe(variety, base, max_depth, cap))
    result = graph.chain(t, u)
    logger.info(
        f"Entailment bound {format_term(t)} ~ {format_term(u)} at depth {max_depth}: "
        f"{format_dist(result.value)}"
    )
    return result


def entailment_upper_bound(
    variety: VarietyPresentation,
    t: Term,
    u: Term,
    base: Sequence[Hashable],
    max_depth: int,
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> float:
    """A sound upper bound on the entailed distance of t and u; nonincreasing in max_depth."""
    return entailment_chain(variety, t, u, base, max_depth, cap).value


def entailment_pseudometric(variety: VarietyPresentation, universe: TermUniverse) -> FinPseudoSpace:
    return RewriteGraph(variety, universe).pseudometric()
