"""
Pseudometric meets, shortest-path closure and metric reflection.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .distances import INF, ext_sum
from .spaces import FinMetricSpace, FinPseudoSpace

# Configure logging for this module
logger = logging.getLogger(__name__)


def shortest_path_closure(weights: np.ndarray) -> np.ndarray:
    """
    All-pairs shortest paths (Floyd-Warshall) over a symmetric nonnegative weight table.

    The pivot order is the row order, so repeated runs give bitwise identical results.

    Args:
        weights: Square array of edge weights; infinity means no edge.

    Returns:
        A new array with the closure; the diagonal is set to 0.
    """
    dist = np.array(weights, dtype=float, copy=True)
    n = dist.shape[0]
    if n == 0:
        return dist
    np.fill_diagonal(dist, 0.0)
    for k in range(n):
        dist = np.minimum(dist, dist[:, k, None] + dist[None, k, :])
    return dist


def meet(d1: FinPseudoSpace, d2: FinPseudoSpace) -> FinPseudoSpace:
    """
    Greatest pseudometric below both arguments.

    Args:
        d1: First pseudometric.
        d2: Second pseudometric on the same point set (any order).

    Returns:
        A pseudometric on d1's point order.

    Raises:
        ValueError: If the point sets differ.
    """
    if not d1.same_points(d2):
        raise ValueError(
            f"Cannot meet pseudometrics on different point sets ({len(d1)} vs {len(d2)} points)"
        )
    pointwise = np.minimum(d1.matrix, d1.aligned_matrix(d2))
    closed = shortest_path_closure(pointwise)
    logger.debug(f"Meet computed over {len(d1)} points")
    return FinPseudoSpace(d1.points, closed, validate=False)


def chain_infimum(
    d0: Callable[[Hashable, Hashable], float],
    points: Sequence[Hashable],
    x: Hashable,
    y: Hashable,
    max_len: Optional[int] = None,
) -> float:
    """
    Brute-force infimum of chain costs x = s_0, ..., s_n = y with n <= max_len.

    Every intermediate sequence is tried explicitly, so this is only for small point sets.
    """
    if x == y:
        return 0.0
    points = list(points)
    if max_len is None:
        max_len = max(len(points) - 1, 1)
    best = INF
    for n in range(1, max_len + 1):
        for middle in itertools.product(points, repeat=n - 1):
            chain = (x,) + middle + (y,)
            cost = ext_sum(d0(a, b) for a, b in zip(chain, chain[1:]))
            if cost < best:
                best = cost
    return best


def min_plus_chain_costs(
    weights: np.ndarray,
    i: int,
    j: int,
    max_len: int,
    below: Optional[float] = None,
) -> List[float]:
    """
    Minimal cost of chains from i to j with exactly n steps, for n = 1..max_len.

    Consecutive chain members must differ. With `below` set, only edges of weight strictly
    less than `below` may be used.
    """
    w = np.array(weights, dtype=float, copy=True)
    np.fill_diagonal(w, INF)
    if below is not None:
        w[w >= below] = INF
    current = w[i].copy()
    costs = [float(current[j])]
    for _ in range(2, max_len + 1):
        current = np.min(current[:, None] + w, axis=0)
        costs.append(float(current[j]))
    return costs


@dataclass(frozen=True)
class MetricReflection:
    """The metric quotient of a pseudometric space together with its quotient map."""

    space: FinMetricSpace
    quotient: Dict[Hashable, Hashable]
    classes: Tuple[Tuple[Hashable, ...], ...]

    def class_of(self, p: Hashable) -> Tuple[Hashable, ...]:
        rep = self.quotient[p]
        return next(c for c in self.classes if c[0] == rep)


def zero_classes(space: FinPseudoSpace) -> List[List[int]]:
    """Index lists of the distance-0 classes, each in point order, ordered by first member."""
    m = space.matrix
    assigned = np.full(len(space), -1)
    classes: List[List[int]] = []
    for i in range(len(space)):
        if assigned[i] >= 0:
            continue
        members = [int(k) for k in np.nonzero(m[i] == 0)[0] if assigned[k] < 0]
        for k in members:
            assigned[k] = len(classes)
        classes.append(members)
    return classes


def metric_reflection(space: FinPseudoSpace) -> MetricReflection:
    """
    Identifies points at distance 0.

    Each class is labelled by its first member in the original point order, and the
    quotient map sends every point to that label. The quotient preserves distances.
    """
    classes = zero_classes(space)
    reps = [c[0] for c in classes]
    matrix = space.matrix[np.ix_(reps, reps)]
    labels = tuple(space.points[r] for r in reps)
    quotient = {space.points[k]: space.points[c[0]] for c in classes for k in c}
    reflected = FinMetricSpace(labels, matrix, validate=False)
    logger.debug(f"Metric reflection: {len(space)} points -> {len(labels)} classes")
    return MetricReflection(
        space=reflected,
        quotient=quotient,
        classes=tuple(tuple(space.points[k] for k in c) for c in classes),
    )
