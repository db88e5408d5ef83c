"""
Finitary signatures, term trees, the free-algebra metric d* and term enumeration.
"""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import (
    Any,
    Callable,
    Dict,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Protocol,
    Sequence,
    Tuple,
    Union,
)

from .distances import INF
from .errors import ArityError, EvaluationError, TermSyntaxError, UniverseCapExceeded
from .sexpr import Atom, SExpr, SList, read

# Configure logging for this module
logger = logging.getLogger(__name__)

DEFAULT_UNIVERSE_CAP = 1_000_000

_VARIABLE = re.compile(r"^x(\d+)$")


# --- Signatures ---


@dataclass(frozen=True)
class Signature:
    """Operation symbols with their arities, in declaration order."""

    ops: Tuple[Tuple[str, int], ...]

    _arity: Dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        ops = tuple((str(name), int(arity)) for name, arity in self.ops)
        arity = {}
        for name, n in ops:
            if name in arity:
                raise ValueError(f"Duplicate operation symbol: {name!r}")
            if n < 0:
                raise ValueError(f"Arity of {name!r} must be nonnegative, got {n}")
            arity[name] = n
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "_arity", arity)

    @classmethod
    def of(cls, ops: Mapping[str, int]) -> "Signature":
        return cls(tuple(ops.items()))

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Signature":
        """Reads {"ops": {"sigma1": 2, "e": 0}} (or the bare mapping)."""
        ops = data.get("ops", data) if isinstance(data, Mapping) else None
        if not isinstance(ops, Mapping):
            raise ValueError("Signature JSON must map symbol names to arities")
        for name, n in ops.items():
            if isinstance(n, bool) or not isinstance(n, int):
                raise ValueError(f"Arity of {name!r} must be an integer, got {n!r}")
        return cls.of(ops)

    def to_json(self) -> Dict[str, Any]:
        return {"ops": dict(self.ops)}

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._arity

    def arity(self, symbol: str) -> int:
        try:
            return self._arity[symbol]
        except KeyError:
            raise ArityError(f"Unknown operation symbol: {symbol!r}") from None

    @property
    def symbols(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.ops)

    @property
    def constants(self) -> Tuple[str, ...]:
        return tuple(name for name, n in self.ops if n == 0)

    @property
    def max_arity(self) -> int:
        return max((n for _, n in self.ops), default=0)


# --- Terms ---


@dataclass(frozen=True)
class Leaf:
    """A point of the base space (or a formal variable)."""

    point: Hashable


@dataclass(frozen=True)
class Node:
    """An operation symbol applied to arity-many children."""

    symbol: str
    children: Tuple["Term", ...] = ()

    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "_hash", hash((self.symbol, self.children)))

    def __hash__(self) -> int:
        return self._hash


Term = Union[Leaf, Node]


def leaf(point: Hashable) -> Leaf:
    return Leaf(point)


def node(symbol: str, *children: Term) -> Node:
    return Node(symbol, tuple(children))


def formal_variable(i: int) -> Leaf:
    return Leaf(f"x{i}")


def variable_index(point: Hashable) -> Optional[int]:
    """Index k if point is the formal variable xk, else None."""
    if isinstance(point, str):
        match = _VARIABLE.match(point)
        if match:
            return int(match.group(1))
    return None


def depth(t: Term) -> int:
    """0 for leaves and constants, otherwise 1 + the largest child depth."""
    if isinstance(t, Leaf) or not t.children:
        return 0
    return 1 + max(depth(c) for c in t.children)


def similar(t: Term, u: Term) -> bool:
    """True iff u arises from t by relabelling leaves."""
    if isinstance(t, Leaf) or isinstance(u, Leaf):
        return isinstance(t, Leaf) and isinstance(u, Leaf)
    if t.symbol != u.symbol or len(t.children) != len(u.children):
        return False
    return all(similar(a, b) for a, b in zip(t.children, u.children))


class PointDistance(Protocol):
    def dist(self, p: Any, q: Any) -> float:
        ...


def dstar(t: Term, u: Term, space: PointDistance) -> float:
    """
    The free-algebra metric on terms.

    Leaves are compared in the base space; similar composite terms take the maximum over
    their children; terms that are not similar are at distance infinity.
    """
    if isinstance(t, Leaf) and isinstance(u, Leaf):
        return space.dist(t.point, u.point)
    if isinstance(t, Leaf) or isinstance(u, Leaf):
        return INF
    if t.symbol != u.symbol or len(t.children) != len(u.children):
        return INF
    worst = 0.0
    for a, b in zip(t.children, u.children):
        d = dstar(a, b, space)
        if d == INF:
            return INF
        worst = max(worst, d)
    return worst


def leaves(t: Term) -> List[Hashable]:
    """Leaf points from left to right."""
    if isinstance(t, Leaf):
        return [t.point]
    out: List[Hashable] = []
    for c in t.children:
        out.extend(leaves(c))
    return out


def symbols_of(t: Term) -> List[str]:
    if isinstance(t, Leaf):
        return []
    out = [t.symbol]
    for c in t.children:
        out.extend(symbols_of(c))
    return out


def relabel(t: Term, f: Union[Mapping[Hashable, Hashable], Callable[[Hashable], Hashable]]) -> Term:
    """Applies a map to every leaf (the action of T on a map of base spaces)."""
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    if isinstance(t, Leaf):
        return Leaf(fn(t.point))
    return Node(t.symbol, tuple(relabel(c, fn) for c in t.children))


def flatten(t: Term) -> Term:
    """Collapses a term whose leaves are terms into a single term."""
    if isinstance(t, Leaf):
        if isinstance(t.point, (Leaf, Node)):
            return t.point
        return t
    return Node(t.symbol, tuple(flatten(c) for c in t.children))


def skeleton(t: Term) -> Any:
    """Bare shape: None for a leaf, the tuple of child skeletons for a node."""
    if isinstance(t, Leaf):
        return None
    return tuple(skeleton(c) for c in t.children)


class Interpretation(Protocol):
    def operate(self, symbol: str, args: Sequence[Any]) -> Any:
        ...


def evaluate(t: Term, algebra: Interpretation, env: Union[Mapping[Hashable, Any], Callable[[Hashable], Any]]) -> Any:
    """
    Structural evaluation: leaves through env, nodes through the algebra's operations.

    Raises:
        EvaluationError: If env is undefined on a leaf or the algebra rejects a symbol.
    """
    if isinstance(t, Leaf):
        try:
            return env[t.point] if isinstance(env, Mapping) else env(t.point)
        except KeyError:
            raise EvaluationError(f"No value assigned to leaf {t.point!r}") from None
    args = [evaluate(c, algebra, env) for c in t.children]
    return algebra.operate(t.symbol, args)


def substitute_symbol(s: Term, gamma: str, t: Term, arity: int) -> Term:
    """
    Replaces every occurrence of gamma in s by t, whose formal variables x0..x{n-1} stand
    for the (recursively substituted) arguments of that occurrence.

    Raises:
        ArityError: If t uses a variable beyond gamma's arity or gamma occurs with the wrong
            number of arguments.
    """
    for p in leaves(t):
        k = variable_index(p)
        if k is None:
            raise ArityError(f"Substituted term may only use formal variables, found leaf {p!r}")
        if k >= arity:
            raise ArityError(f"Variable x{k} exceeds the arity {arity} of {gamma!r}")
    return _substitute(s, gamma, t, arity)


def _substitute(s: Term, gamma: str, t: Term, arity: int) -> Term:
    if isinstance(s, Leaf):
        return s
    children = tuple(_substitute(c, gamma, t, arity) for c in s.children)
    if s.symbol != gamma:
        return Node(s.symbol, children)
    if len(children) != arity:
        raise ArityError(f"{gamma!r} occurs with {len(children)} arguments, expected {arity}")
    return _instantiate(t, children)


def _instantiate(t: Term, args: Sequence[Term]) -> Term:
    if isinstance(t, Leaf):
        return args[variable_index(t.point)]
    return Node(t.symbol, tuple(_instantiate(c, args) for c in t.children))


def instantiate(t: Term, assignment: Mapping[Hashable, Term]) -> Term:
    """Replaces leaves found in the assignment by terms; other leaves stay."""
    if isinstance(t, Leaf):
        return assignment.get(t.point, t)
    return Node(t.symbol, tuple(instantiate(c, assignment) for c in t.children))


# --- Enumeration ---


def count_terms(n_points: int, signature: Signature, max_depth: int) -> int:
    """Number of terms of depth <= max_depth over n_points leaves."""
    base = n_points + len(signature.constants)
    count = base
    for _ in range(max_depth):
        count = base + sum(count ** n for _, n in signature.ops if n > 0)
    return count


@dataclass(frozen=True)
class TermUniverse:
    """All terms over a finite base of depth at most max_depth, in enumeration order."""

    base: Tuple[Hashable, ...]
    signature: Signature
    max_depth: int
    terms: Tuple[Term, ...]

    _index: Dict[Term, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def __contains__(self, t: object) -> bool:
        return t in self._index

    def index_of(self, t: Term) -> int:
        try:
            return self._index[t]
        except KeyError:
            raise KeyError(f"Term {format_term(t)} is outside the universe") from None

    def of_depth(self, k: int) -> List[Term]:
        return [t for t in self.terms if depth(t) == k]


def enumerate_universe(
    base: Sequence[Hashable],
    signature: Signature,
    max_depth: int,
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> TermUniverse:
    """
    Lists every term of depth <= max_depth over the base points.

    Order: by depth; within depth 0 the leaves in base order then constants; composite
    terms by symbol in signature order with children in product order of the previous level.

    Raises:
        ValueError: If max_depth is negative.
        UniverseCapExceeded: If the projected count exceeds the cap.
    """
    if max_depth < 0:
        raise ValueError(f"max_depth must be >= 0, got {max_depth}")
    projected = count_terms(len(base), signature, max_depth)
    if projected > cap:
        raise UniverseCapExceeded(projected, cap)

    level0: List[Term] = [Leaf(p) for p in base] + [Node(c, ()) for c in signature.constants]
    previous = level0
    for _ in range(max_depth):
        composite = [
            Node(sym, children)
            for sym, n in signature.ops if n > 0
            for children in itertools.product(previous, repeat=n)
        ]
        previous = level0 + composite
    ordered = sorted(previous, key=depth)
    logger.debug(f"Enumerated {len(ordered)} terms of depth <= {max_depth}")
    return TermUniverse(tuple(base), signature, max_depth, tuple(ordered))


# --- Text form ---


def format_term(t: Term, leaf_format: Callable[[Hashable], str] = str) -> str:
    """s-expression text; constants are written (c)."""
    if isinstance(t, Leaf):
        if isinstance(t.point, (Leaf, Node)):
            return format_term(t.point, leaf_format)
        return leaf_format(t.point)
    if not t.children:
        return f"({t.symbol})"
    return "(" + " ".join([t.symbol] + [format_term(c, leaf_format) for c in t.children]) + ")"


def parse_term(
    text: str,
    signature: Optional[Signature] = None,
    points: Optional[Iterable[Hashable]] = None,
) -> Term:
    """
    Parses an s-expression such as "(sigma1 (sigma2 a a) (sigma1 b b))".

    Args:
        text: The term text.
        signature: When given, symbols must be declared and applied with their arity.
        points: When given, leaves must be points of this set or formal variables.

    Raises:
        TermSyntaxError: On malformed text, unknown symbols or leaves, or a constant
            written without parentheses.
        ArityError: On a symbol applied to the wrong number of arguments.
    """
    allowed = set(points) if points is not None else None
    return _build(read(text), signature, allowed)


def _build(expr: SExpr, signature: Optional[Signature], allowed: Optional[set]) -> Term:
    if isinstance(expr, Atom):
        name = expr.value
        if signature is not None and name in signature:
            if signature.arity(name) == 0:
                raise TermSyntaxError(f"Constant {name!r} must be written ({name})", expr.position)
            raise TermSyntaxError(f"Operation symbol {name!r} used as a leaf", expr.position)
        if allowed is not None and name not in allowed and variable_index(name) is None:
            raise TermSyntaxError(f"Unknown point {name!r}", expr.position)
        return Leaf(name)
    assert isinstance(expr, SList)
    if not expr.items or not isinstance(expr.items[0], Atom):
        raise TermSyntaxError("Expected an operation symbol after '('", expr.position)
    symbol = expr.items[0].value
    args = expr.items[1:]
    if signature is not None:
        if symbol not in signature:
            raise TermSyntaxError(f"Unknown operation symbol {symbol!r}", expr.position)
        if signature.arity(symbol) != len(args):
            raise ArityError(
                f"{symbol!r} has arity {signature.arity(symbol)} but was given {len(args)} "
                f"arguments (at offset {expr.position})"
            )
    return Node(symbol, tuple(_build(a, signature, allowed) for a in args))
