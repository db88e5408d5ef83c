"""
Finite extended (pseudo)metric spaces and their standard combinations.

A space is an ordered tuple of hashable points plus a symmetric distance table held
as a read-only numpy array. Distances may be infinite.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import (
    Any,
    Callable,
    Dict,
    Hashable,
    Iterator,
    List,
    Mapping,
    Optional,
    Protocol,
    Sequence,
    Tuple,
)

import numpy as np

from .distances import INF, TOLERANCE, dist_to_json, format_dist, parse_dist
from .errors import MetricValidationError

# Configure logging for this module
logger = logging.getLogger(__name__)

Point = Hashable


class DistanceSpace(Protocol):
    """Anything that can measure the distance of two of its points."""

    def dist(self, p: Any, q: Any) -> float:
        ...


@dataclass(frozen=True, eq=False)
class FinPseudoSpace:
    """A finite set of points with an extended pseudometric."""

    points: Tuple[Point, ...]
    matrix: np.ndarray
    validate: bool = True

    _index: Dict[Point, int] = field(init=False, repr=False)

    def __post_init__(self):
        points = tuple(self.points)
        matrix = np.array(self.matrix, dtype=float, copy=True)
        n = len(points)
        if matrix.shape != (n, n):
            raise MetricValidationError(
                f"Distance table has shape {matrix.shape}, expected ({n}, {n})"
            )
        index = {p: i for i, p in enumerate(points)}
        if len(index) != n:
            dup = next(p for i, p in enumerate(points) if index[p] != i)
            raise MetricValidationError(f"Duplicate point identifier: {dup!r}")
        matrix.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "_index", index)
        if self.validate:
            self._check()

    def _check(self) -> None:
        validate_pseudometric(self)

    # --- Lookup ---

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, p: object) -> bool:
        return p in self._index

    def index_of(self, p: Point) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise KeyError(f"Point {p!r} is not in the space") from None

    def dist(self, p: Point, q: Point) -> float:
        return float(self.matrix[self.index_of(p), self.index_of(q)])

    def same_points(self, other: "FinPseudoSpace") -> bool:
        return set(self.points) == set(other.points)

    def aligned_matrix(self, other: "FinPseudoSpace") -> np.ndarray:
        """Returns other's distance table reordered to this space's point order."""
        if not self.same_points(other):
            raise ValueError("Spaces do not share the same point set")
        order = [other.index_of(p) for p in self.points]
        return other.matrix[np.ix_(order, order)]

    def is_metric(self) -> bool:
        """True if distinct points are at nonzero distance."""
        off = ~np.eye(len(self.points), dtype=bool)
        return bool(np.all(self.matrix[off] > 0))

    def restrict(self, subset: Sequence[Point]) -> "FinPseudoSpace":
        order = [self.index_of(p) for p in subset]
        return type(self)(tuple(subset), self.matrix[np.ix_(order, order)], validate=False)

    def diameter(self) -> float:
        if len(self.points) == 0:
            return 0.0
        return float(self.matrix.max())

    # --- Construction ---

    @classmethod
    def from_function(
        cls, points: Sequence[Point], fn: Callable[[Point, Point], float], validate: bool = True
    ):
        """Tabulates fn over all pairs; the diagonal is forced to 0."""
        points = tuple(points)
        n = len(points)
        matrix = np.zeros((n, n))
        for i, j in itertools.combinations(range(n), 2):
            d = float(fn(points[i], points[j]))
            matrix[i, j] = matrix[j, i] = d
        return cls(points, matrix, validate=validate)

    @classmethod
    def from_json(cls, data: Mapping[str, Any]):
        """
        Builds a space from the JSON space format.

        Args:
            data: {"points": [...], "dist": [[p, q, d], ...], "default": number or "inf"}.
                Unlisted off-diagonal pairs take the default; the diagonal is forced to 0 and
                symmetry is completed.

        Raises:
            MetricValidationError: On malformed input or a violated axiom.
        """
        if not isinstance(data, Mapping) or "points" not in data:
            raise MetricValidationError("Space JSON must be an object with a 'points' list")
        points = [str(p) for p in data["points"]]
        default = parse_dist(data.get("default", "inf"))
        n = len(points)
        matrix = np.full((n, n), default)
        np.fill_diagonal(matrix, 0.0)
        index = {p: i for i, p in enumerate(points)}
        if len(index) != n:
            raise MetricValidationError("Duplicate point identifiers in 'points'")
        given: Dict[Tuple[int, int], float] = {}
        for entry in data.get("dist", []):
            if not isinstance(entry, (list, tuple)) or len(entry) != 3:
                raise MetricValidationError(f"Distance entry must be [p, q, d], got {entry!r}")
            p, q, raw = entry
            if p not in index or q not in index:
                raise MetricValidationError(f"Distance entry names unknown point: {entry!r}")
            i, j = index[p], index[q]
            d = parse_dist(raw)
            if i == j:
                if d != 0:
                    raise MetricValidationError(f"Diagonal distance of {p!r} must be 0")
                continue
            key = (min(i, j), max(i, j))
            if key in given and given[key] != d:
                raise MetricValidationError(
                    f"Conflicting distances for ({p!r}, {q!r}): {given[key]} and {d}"
                )
            given[key] = d
            matrix[i, j] = matrix[j, i] = d
        return cls(tuple(points), matrix)

    def to_json(self) -> Dict[str, Any]:
        entries = []
        for i, j in itertools.combinations(range(len(self.points)), 2):
            entries.append([_point_json(self.points[i]), _point_json(self.points[j]),
                            dist_to_json(float(self.matrix[i, j]))])
        return {"points": [_point_json(p) for p in self.points], "dist": entries}


@dataclass(frozen=True, eq=False)
class FinMetricSpace(FinPseudoSpace):
    """A finite extended metric space: distance 0 only on the diagonal."""

    def _check(self) -> None:
        validate_metric(self)


def _point_json(p: Point) -> Any:
    return p if isinstance(p, (str, int, float)) else str(p)


def validate_pseudometric(space: FinPseudoSpace, tol: float = TOLERANCE) -> None:
    """
    Checks zero diagonal, nonnegativity, symmetry and the triangle inequality over all triples.

    Raises:
        MetricValidationError: Naming the first offending pair or triple.
    """
    m = space.matrix
    pts = space.points
    n = len(pts)
    if n == 0:
        return
    if np.isnan(m).any():
        raise MetricValidationError("Distance table contains NaN")
    diag = np.nonzero(np.diag(m) != 0)[0]
    if diag.size:
        p = pts[diag[0]]
        raise MetricValidationError(f"Distance of {p!r} to itself is {m[diag[0], diag[0]]}, not 0")
    neg = np.argwhere(m < 0)
    if neg.size:
        i, j = neg[0]
        raise MetricValidationError(f"Negative distance between {pts[i]!r} and {pts[j]!r}")
    asym = np.argwhere(m != m.T)
    if asym.size:
        i, j = asym[0]
        raise MetricValidationError(
            f"Asymmetric distance: d({pts[i]!r}, {pts[j]!r}) = {m[i, j]} "
            f"but d({pts[j]!r}, {pts[i]!r}) = {m[j, i]}"
        )
    for k in range(n):
        via = m[:, k, None] + m[None, k, :]
        bad = np.argwhere(m > via + tol)
        if bad.size:
            i, j = bad[0]
            raise MetricValidationError(
                f"Triangle inequality violated for triple ({pts[i]!r}, {pts[k]!r}, {pts[j]!r}): "
                f"d({pts[i]!r}, {pts[j]!r}) = {format_dist(m[i, j])} > "
                f"{format_dist(m[i, k])} + {format_dist(m[k, j])}"
            )


def validate_metric(space: FinPseudoSpace, tol: float = TOLERANCE) -> None:
    """Pseudometric axioms plus separation (distance 0 implies equality)."""
    validate_pseudometric(space, tol)
    m = space.matrix
    zero = np.argwhere((m == 0) & ~np.eye(len(space.points), dtype=bool))
    if zero.size:
        i, j = zero[0]
        raise MetricValidationError(
            f"Distinct points {space.points[i]!r} and {space.points[j]!r} are at distance 0"
        )


# --- Standard constructions ---


def max_product(x: FinMetricSpace, y: FinMetricSpace) -> FinMetricSpace:
    """Categorical product: cartesian product with the maximum metric."""
    points = [(a, b) for a in x.points for b in y.points]
    mx = np.kron(x.matrix, np.ones((len(y), len(y))))
    my = np.kron(np.ones((len(x), len(x))), y.matrix)
    return FinMetricSpace(tuple(points), np.maximum(mx, my))


def sum_tensor(x: FinMetricSpace, y: FinMetricSpace) -> FinMetricSpace:
    """Monoidal tensor: cartesian product with the sum metric (infinity absorbing)."""
    points = [(a, b) for a in x.points for b in y.points]
    mx = np.kron(x.matrix, np.ones((len(y), len(y))))
    my = np.kron(np.ones((len(x), len(x))), y.matrix)
    return FinMetricSpace(tuple(points), mx + my)


def coproduct(spaces: Sequence[FinMetricSpace]) -> FinMetricSpace:
    """Disjoint union tagged by summand index; distance infinity across summands."""
    points: List[Tuple[int, Point]] = []
    for k, s in enumerate(spaces):
        points.extend((k, p) for p in s.points)
    n = len(points)
    matrix = np.full((n, n), INF)
    offset = 0
    for s in spaces:
        size = len(s)
        matrix[offset:offset + size, offset:offset + size] = s.matrix
        offset += size
    return FinMetricSpace(tuple(points), matrix)


def discrete(ids: Sequence[Point]) -> FinMetricSpace:
    """
    The discrete space |X| on the given identifiers: all nonzero distances are infinite.

    Raises:
        MetricValidationError: If identifiers repeat.
    """
    ids = tuple(ids)
    if len(set(ids)) != len(ids):
        raise MetricValidationError(f"Duplicate identifiers in discrete space: {ids!r}")
    n = len(ids)
    matrix = np.full((n, n), INF)
    np.fill_diagonal(matrix, 0.0)
    return FinMetricSpace(ids, matrix)


def underlying_discrete(x: FinPseudoSpace) -> FinMetricSpace:
    return discrete(x.points)


@dataclass(frozen=True)
class NonexpansionWitness:
    """A pair of points whose images are farther apart than the points themselves."""

    p: Point
    q: Point
    source_distance: float
    target_distance: float


def is_nonexpanding(
    f: Mapping[Point, Point], source: DistanceSpace, target: DistanceSpace,
    points: Optional[Sequence[Point]] = None, tol: float = TOLERANCE,
) -> Optional[NonexpansionWitness]:
    """
    Checks d_target(f p, f q) <= d_source(p, q) over all pairs.

    Returns:
        None if f is nonexpanding, otherwise the first violating pair.
    """
    pts = list(points) if points is not None else list(getattr(source, "points"))
    for p, q in itertools.combinations(pts, 2):
        ds = source.dist(p, q)
        dt = target.dist(f[p], f[q])
        if dt > ds + tol:
            return NonexpansionWitness(p, q, ds, dt)
    return None


def identity_comparison(x: FinMetricSpace) -> Dict[Point, Point]:
    """
    The identity-carried morphism i_X : |X| -> X.

    Raises:
        MetricValidationError: Never for a valid X; the check guards hand-built tables.
    """
    mapping = {p: p for p in x.points}
    witness = is_nonexpanding(mapping, underlying_discrete(x), x)
    if witness is not None:
        raise MetricValidationError(f"Identity-carried comparison expands at {witness}")
    return mapping


def hom_distance(
    f: Mapping[Point, Point], g: Mapping[Point, Point], source_points: Sequence[Point],
    target: DistanceSpace,
) -> float:
    """Supremum distance of two maps into a space (0 for an empty domain)."""
    return max((target.dist(f[p], g[p]) for p in source_points), default=0.0)


# --- Diagonal neighbourhoods ---


@dataclass(frozen=True)
class DiagonalNeighborhood:
    """All pairs of points at distance at most eps, with the two projections."""

    base: FinMetricSpace
    eps: float
    pairs: Tuple[Tuple[Point, Point], ...]

    def left(self, pair: Tuple[Point, Point]) -> Point:
        return pair[0]

    def right(self, pair: Tuple[Point, Point]) -> Point:
        return pair[1]

    @property
    def left_map(self) -> Dict[Tuple[Point, Point], Point]:
        return {pair: pair[0] for pair in self.pairs}

    @property
    def right_map(self) -> Dict[Tuple[Point, Point], Point]:
        return {pair: pair[1] for pair in self.pairs}


def diagonal_neighborhood(x: FinMetricSpace, eps: float) -> DiagonalNeighborhood:
    pairs = tuple(
        (p, q) for p in x.points for q in x.points if x.dist(p, q) <= eps
    )
    logger.debug(f"Diagonal neighbourhood at eps={format_dist(eps)}: {len(pairs)} pairs")
    return DiagonalNeighborhood(base=x, eps=eps, pairs=pairs)
