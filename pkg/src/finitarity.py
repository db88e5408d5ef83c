"""
Strong-finitarity probes and the two eps-close operations counter-example.

The probes work on bounded universes: condition (cond) compares images of terms over the
eps-neighbourhood of the diagonal under the left and right projections, and the
factorization check asks whether a map out of the model over |X| stays nonexpanding for the
metric of the model over X.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .closure import meet, min_plus_chain_costs, shortest_path_closure
from .distances import INF, TOLERANCE, WITNESS_MARGIN, ext_add, format_dist, leq
from .errors import PreconditionError, TruncationError
from .memo import Memo
from .metric_log import log_metric
from .models.base import Element, FreeAlgebraModel
from .models.term_models import TwoOpsModel
from .reports import Claim, Report
from .spaces import FinMetricSpace, FinPseudoSpace, diagonal_neighborhood, discrete
from .terms import Leaf, Node, Term, dstar, enumerate_universe, skeleton

# Configure logging for this module
logger = logging.getLogger(__name__)

DEFAULT_EPS_GRID = (0.25, 0.5, 1.0)

# Largest universe depth swept by the counter-example; its witnesses live at depth 2.
SWEEP_DEPTH = 2

# Variety kinds whose model over X is strictly below the comparison meet.
NON_FACTORIZING_KINDS = frozenset({"two-eps-ops"})

ElementMap = Union[Mapping[Element, Hashable], Callable[[Element], Hashable]]


def _call(f: ElementMap, element: Element) -> Hashable:
    try:
        return f[element] if isinstance(f, Mapping) else f(element)
    except KeyError:
        raise ValueError(f"Map is undefined on element {element!r}") from None


def joint_pairs(
    model: FreeAlgebraModel, seeds: Sequence[Tuple[Element, Element]], depth: int
) -> List[Tuple[Element, Element]]:
    """
    Pairs (T l (u), T r (u)) for every term u of depth <= depth over the seed pairs.

    Generated componentwise from the seeds, the constants and the operations; results that
    a bounded model cannot represent are skipped.
    """
    level0: List[Tuple[Element, Element]] = list(dict.fromkeys(seeds))
    for c in model.signature.constants:
        value = model.operate(c, ())
        level0.append((value, value))
    seen: Dict[Tuple[Element, Element], None] = dict.fromkeys(level0)
    previous = list(seen)
    for _ in range(depth):
        current: Dict[Tuple[Element, Element], None] = dict.fromkeys(level0)
        for symbol, n in model.signature.ops:
            if n == 0:
                continue
            for combo in itertools.product(previous, repeat=n):
                try:
                    pair = (
                        model.operate(symbol, [p[0] for p in combo]),
                        model.operate(symbol, [p[1] for p in combo]),
                    )
                except TruncationError:
                    continue
                current.setdefault(pair, None)
        previous = list(current)
        for pair in previous:
            seen.setdefault(pair, None)
    return list(seen)


@dataclass(frozen=True)
class ConditionReport:
    """Per eps: the largest d_Y(f T l_eps u, f T r_eps u) over the swept terms u."""

    eps_values: Tuple[float, ...]
    maxima: Tuple[float, ...]
    pairs_checked: Tuple[int, ...]
    witnesses: Tuple[Optional[Tuple[Element, Element]], ...]
    max_depth: int

    @property
    def passed_per_eps(self) -> Tuple[bool, ...]:
        return tuple(leq(m, e) for m, e in zip(self.maxima, self.eps_values))

    @property
    def passed(self) -> bool:
        return all(self.passed_per_eps)


def check_condition(
    model: FreeAlgebraModel,
    space: FinMetricSpace,
    f: ElementMap,
    target: Any,
    eps_values: Sequence[float],
    max_depth: int,
) -> ConditionReport:
    """
    Sweeps condition (cond) for a model built over the discrete space on X's points.

    Args:
        model: Free-algebra model over |X|.
        space: The metric space X.
        f: Map from model elements to points of the target.
        target: Anything with dist(p, q).
        eps_values: The eps grid.
        max_depth: Depth of the swept term universe.

    Raises:
        ValueError: If f is undefined on a swept element.
    """
    maxima, counts, witnesses = [], [], []
    for k, eps in enumerate(eps_values):
        neighborhood = diagonal_neighborhood(space, eps)
        seeds = [(model.unit(x), model.unit(y)) for x, y in neighborhood.pairs]
        worst, witness = 0.0, None
        pairs = joint_pairs(model, seeds, max_depth)
        for left, right in pairs:
            d = target.dist(_call(f, left), _call(f, right))
            if d > worst:
                worst, witness = d, (left, right)
        maxima.append(worst)
        counts.append(len(pairs))
        witnesses.append(witness)
        log_metric(k, f"condition_max@eps={format_dist(eps)}", worst)
    return ConditionReport(tuple(eps_values), tuple(maxima), tuple(counts), tuple(witnesses), max_depth)


@dataclass(frozen=True)
class FactorizationVerdict:
    verdict: str  # "exists", "fails" or "inconclusive"
    pairs_checked: int
    witness: Optional[Tuple[Element, Element]] = None
    model_distance: Optional[float] = None
    target_distance: Optional[float] = None
    comparison_surjective: bool = True

    @property
    def exists(self) -> bool:
        return self.verdict == "exists"

    @property
    def fails(self) -> bool:
        return self.verdict == "fails"


def check_factorization(
    discrete_model: FreeAlgebraModel,
    model: FreeAlgebraModel,
    f: ElementMap,
    target: Any,
    max_depth: int,
    stop_at_first: bool = True,
) -> FactorizationVerdict:
    """
    Decides on a bounded universe whether f factors nonexpandingly through T i_X.

    With an identity-carried comparison the factorization can only be f itself, so it
    exists iff f is nonexpanding for the metric of the model over X. A pair that f or the
    target cannot represent makes the verdict "inconclusive", unless a failure was already
    found; the witness is then the pair being checked.

    Raises:
        PreconditionError: If the comparison from the model over |X| is not identity-carried.
    """
    if not (discrete_model.identity_carried and model.identity_carried):
        raise PreconditionError(f"{model.name} does not certify an identity-carried comparison")
    discrete_elements = discrete_model.element_universe(max_depth)
    for s in discrete_elements:
        image = model.quotient(discrete_model.representative(s))
        if image != s:
            raise PreconditionError(
                f"Comparison is not identity-carried: {discrete_model.format_element(s)} "
                f"maps to {model.format_element(image)}"
            )
    elements = model.element_universe(max_depth)
    known = set(discrete_elements)
    surjective = all(e in known for e in elements)

    checked = 0
    failure: Optional[FactorizationVerdict] = None
    for i, s in enumerate(elements):
        for t in elements[i + 1:]:
            d_model = model.distance(s, t)
            if d_model == INF:
                continue
            checked += 1
            try:
                d_target = target.dist(_call(f, s), _call(f, t))
            except TruncationError as e:
                if failure is not None:
                    return FactorizationVerdict("fails", checked, failure.witness, failure.model_distance,
                                                failure.target_distance, surjective)
                logger.warning(f"Factorization inconclusive at depth {max_depth}: {e}")
                return FactorizationVerdict("inconclusive", checked, (s, t), d_model, None, surjective)
            if d_target > d_model + WITNESS_MARGIN:
                logger.info(
                    f"Factorization fails at ({model.format_element(s)}, {model.format_element(t)}): "
                    f"{format_dist(d_target)} > {format_dist(d_model)}"
                )
                failure = failure or FactorizationVerdict("fails", checked, (s, t), d_model, d_target, surjective)
                if stop_at_first:
                    return failure
    if failure is None:
        return FactorizationVerdict("exists", checked, comparison_surjective=surjective)
    return FactorizationVerdict(
        "fails", checked, failure.witness, failure.model_distance, failure.target_distance, surjective
    )


def expected_factorization(kind: str) -> str:
    """Verdict the factorization into the comparison meet should reach for a variety kind."""
    return "fails" if kind in NON_FACTORIZING_KINDS else "exists"


def lifted_costs(
    model: FreeAlgebraModel, space: FinMetricSpace, depth: int
) -> Dict[Tuple[Element, Element], float]:
    """
    Least d*_X cost of (T l (u), T r (u)) over the terms u of depth <= depth on X x X.

    The model is built over |X|; a pair's cost is the largest leaf distance of u, and every
    element pair keeps the cheapest term that reaches it.
    """
    level0: Dict[Tuple[Element, Element], float] = {}
    for x in space.points:
        for y in space.points:
            pair = (model.unit(x), model.unit(y))
            level0[pair] = min(level0.get(pair, INF), space.dist(x, y))
    for c in model.signature.constants:
        value = model.operate(c, ())
        level0[(value, value)] = 0.0
    previous = dict(level0)
    for _ in range(depth):
        current = dict(level0)
        for symbol, n in model.signature.ops:
            if n == 0:
                continue
            for combo in itertools.product(previous.items(), repeat=n):
                try:
                    pair = (
                        model.operate(symbol, [p[0] for p, _ in combo]),
                        model.operate(symbol, [p[1] for p, _ in combo]),
                    )
                except TruncationError:
                    continue
                cost = max(c for _, c in combo)
                if cost < current.get(pair, INF):
                    current[pair] = cost
        previous = current
    return previous


class ComparisonMeetSpace:
    """
    The canonical target for the factorization: the meet of the model over |X| with the
    d*_X costs of term pairs over X x X, closed on the bounded universe.

    It satisfies condition (cond) by construction, and the identity into it factors through
    T i_X exactly when the model over X already is this meet.
    """

    def __init__(self, discrete_model: FreeAlgebraModel, space: FinMetricSpace, max_depth: int):
        self.elements = tuple(discrete_model.element_universe(max_depth))
        self.index = {e: i for i, e in enumerate(self.elements)}
        weights = discrete_model.distance_table(self.elements)
        for (s, t), cost in lifted_costs(discrete_model, space, max_depth).items():
            i, j = self.index.get(s), self.index.get(t)
            if i is None or j is None:
                continue
            if cost < weights[i, j]:
                weights[i, j] = weights[j, i] = cost
        logger.debug(f"Closing the comparison meet over {len(self.elements)} elements")
        self.closed = shortest_path_closure(weights)

    def dist(self, s: Element, t: Element) -> float:
        if s == t:
            return 0.0
        i, j = self.index.get(s), self.index.get(t)
        if i is None or j is None:
            return INF
        return float(self.closed[i, j])


# --- The counter-example ---


def _fill(shape: Any, points: Sequence[Hashable], symbols: Sequence[str]) -> List[Term]:
    """Every term with the given skeleton."""
    if shape is None:
        return [Leaf(p) for p in points]
    child_options = [_fill(c, points, symbols) for c in shape]
    return [
        Node(sym, tuple(children))
        for sym in symbols
        for children in itertools.product(*child_options)
    ]


@dataclass(frozen=True)
class SkeletonClass:
    terms: Tuple[Term, ...]
    index: Dict[Term, int]
    weights: np.ndarray
    closed: np.ndarray


class SkeletonMeetSpace:
    """
    The meet of d* over X and the two-operations metric over |X| on all terms over X.

    Both metrics are infinite between terms of different skeletons, so every finite chain
    stays in one skeleton class; each class is closed lazily and exactly, independent of any
    depth bound.
    """

    def __init__(self, base: FinMetricSpace, eps: float):
        self.base = base
        self.eps = eps
        self.hat = TwoOpsModel(discrete(base.points), eps)
        self.symbols = tuple(self.hat.signature.symbols)
        self._classes: Memo[SkeletonClass] = Memo()

    def edge(self, s: Term, t: Term) -> float:
        """Pointwise minimum of the two metrics."""
        return min(dstar(s, t, self.base), self.hat.distance(s, t))

    def skeleton_class(self, t: Term) -> SkeletonClass:
        shape = skeleton(t)
        return self._classes.get_or_compute(shape, lambda: self._build(shape))

    def _build(self, shape: Any) -> SkeletonClass:
        terms = tuple(_fill(shape, self.base.points, self.symbols))
        n = len(terms)
        weights = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                weights[i, j] = weights[j, i] = self.edge(terms[i], terms[j])
        logger.debug(f"Closing skeleton class of {n} terms")
        return SkeletonClass(terms, {t: i for i, t in enumerate(terms)}, weights, shortest_path_closure(weights))

    def dist(self, s: Term, t: Term) -> float:
        if skeleton(s) != skeleton(t):
            return INF
        cls = self.skeleton_class(s)
        return float(cls.closed[cls.index[s], cls.index[t]])


def universe_meet(base: FinMetricSpace, eps: float, max_depth: int) -> FinPseudoSpace:
    """The same meet computed densely on the whole universe of the given depth."""
    hat = TwoOpsModel(discrete(base.points), eps)
    universe = enumerate_universe(base.points, hat.signature, max_depth)
    terms = universe.terms
    n = len(terms)
    star = np.zeros((n, n))
    hat_matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            star[i, j] = star[j, i] = dstar(terms[i], terms[j], base)
            hat_matrix[i, j] = hat_matrix[j, i] = hat.distance(terms[i], terms[j])
    return meet(
        FinPseudoSpace(terms, star, validate=False),
        FinPseudoSpace(terms, hat_matrix, validate=False),
    )


@dataclass(frozen=True)
class LowerBoundMirror:
    """Minimal chain costs from t to t' by exact number of steps, and cheap-edge reachability."""

    costs: Tuple[float, ...]
    reachable_below_one: bool


def chain_lower_bounds(space: SkeletonMeetSpace, t: Term, u: Term, max_len: int = 4) -> LowerBoundMirror:
    """
    Raises:
        ValueError: If t and u have different skeletons.
    """
    if skeleton(t) != skeleton(u):
        raise ValueError("Terms of different skeletons are not joined by any finite chain")
    cls = space.skeleton_class(t)
    i, j = cls.index[t], cls.index[u]
    costs = min_plus_chain_costs(cls.weights, i, j, max_len)
    cheap = np.where(cls.weights < 1.0, cls.weights, INF)
    reachable = bool(shortest_path_closure(cheap)[i, j] < INF)
    return LowerBoundMirror(tuple(costs), reachable)


def two_point_space() -> FinMetricSpace:
    return FinMetricSpace(("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]))


def witness_terms() -> Tuple[Term, Term, Term]:
    """t, t' and the mediating s1 of the counter-example."""
    a, b = Leaf("a"), Leaf("b")
    t = Node("sigma1", (Node("sigma2", (a, a)), Node("sigma1", (b, b))))
    t_prime = Node("sigma1", (Node("sigma2", (b, b)), Node("sigma2", (b, b))))
    s1 = Node("sigma1", (Node("sigma2", (a, a)), Node("sigma2", (b, b))))
    return t, t_prime, s1


def run_counterexample(
    eps: float,
    max_depth: int = 2,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
) -> Report:
    """
    Reproduces the failure of strong finitarity for two eps-close binary operations.

    Args:
        eps: The closeness bound, strictly between 0 and 1.
        max_depth: Requested depth, at least 2. The sweeps run on universes of depth
            min(max_depth, SWEEP_DEPTH); d_Y itself is exact at every depth, since each
            skeleton class is closed in full.
        eps_grid: The eps values for the condition (cond) sweep.

    Returns:
        A report whose claims all pass iff every expected value is reproduced.

    Raises:
        ValueError: If eps or max_depth is out of range.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must satisfy the assumption 0 < eps < 1, got {format_dist(eps)}")
    if max_depth < 2:
        raise ValueError(f"max_depth must be >= 2 (the witness trees have depth 2), got {max_depth}")

    x = two_point_space()
    model_discrete = TwoOpsModel(discrete(x.points), eps)
    model = TwoOpsModel(x, eps)
    y = SkeletonMeetSpace(x, eps)
    t, t_prime, s1 = witness_terms()
    sweep_depth = min(max_depth, SWEEP_DEPTH)
    identity = lambda e: e  # noqa: E731

    report = Report(
        "counterexample",
        {"eps": eps, "max_depth": max_depth, "sweep_depth": sweep_depth, "eps_grid": list(eps_grid),
         "space": "{a,b}, d(a,b)=1"},
    )

    # (i) f : (terms, d-hat over |X|) -> Y is nonexpanding
    universe = enumerate_universe(x.points, model.signature, sweep_depth).terms
    violations, checked = 0, 0
    first = None
    for i, s in enumerate(universe):
        for u in universe[i + 1:]:
            d_hat = model_discrete.distance(s, u)
            if d_hat == INF:
                continue
            checked += 1
            if not leq(y.dist(s, u), d_hat):
                violations += 1
                first = first or (s, u)
    report.add(Claim.check(
        "f nonexpanding from (terms, d_hat over |X|) to Y", violations, 0, violations == 0, first,
    ))

    # (ii) condition (cond) on the eps grid
    condition = check_condition(model_discrete, x, identity, y, eps_grid, sweep_depth)
    for e, worst, count, ok, witness in zip(
        condition.eps_values, condition.maxima, condition.pairs_checked,
        condition.passed_per_eps, condition.witnesses,
    ):
        report.add(Claim.check(
            f"condition (cond) at eps={format_dist(e)} over {count} terms", worst, f"<= {format_dist(e)}",
            ok, witness if not ok else None,
        ))

    # (iii) the witness distances
    d_hat_x = model.distance(t, t_prime)
    d_y = y.dist(t, t_prime)
    report.add(Claim.distance("d_hat_X(t, t')", d_hat_x, 1.0, tol=0, witness=[t, t_prime]))
    report.add(Claim.distance("d_Y(t, t')", d_y, eps + 1.0, witness=[t, t_prime]))
    dense = universe_meet(x, eps, SWEEP_DEPTH).dist(t, t_prime)
    report.add(Claim.distance(
        f"d_Y(t, t') on the depth-{SWEEP_DEPTH} universe equals the exact skeleton-class value",
        dense, d_y,
    ))

    # (iv) the mediating chain
    first_step = model_discrete.distance(t, s1)
    second_step = dstar(s1, t_prime, x)
    report.add(Claim.distance("d_hat_|X|(t, s1)", first_step, eps, tol=0, witness=s1))
    report.add(Claim.distance("d*_X(s1, t')", second_step, 1.0, tol=0, witness=s1))
    report.add(Claim.check(
        "mediating chain t, s1, t' costs", [first_step, second_step], [eps, 1.0],
        first_step == eps and second_step == 1.0 and math.isclose(ext_add(first_step, second_step), d_y,
                                                                  abs_tol=TOLERANCE),
        [t, s1, t_prime],
    ))

    # lower-bound mirror over the witness's skeleton class
    mirror = chain_lower_bounds(y, t, t_prime)
    report.add(Claim.check(
        "every chain from t to t' uses an edge of cost >= 1", mirror.reachable_below_one, False,
        not mirror.reachable_below_one,
    ))
    longer = mirror.costs[1:]
    report.add(Claim.check(
        "chains of 2..4 steps cost >= eps + 1", list(mirror.costs), f">= {format_dist(eps + 1.0)}",
        mirror.costs[0] == INF and all(leq(eps + 1.0, c) for c in longer),
    ))

    # (v) factorization and verdict
    factorization = check_factorization(model_discrete, model, identity, y, sweep_depth)
    witness = None
    if factorization.witness is not None:
        witness = {
            "pair": list(factorization.witness),
            "d_model": factorization.model_distance,
            "d_target": factorization.target_distance,
        }
    report.add(Claim.check("factorization through T i_X", factorization.verdict, "fails",
                           factorization.fails, witness))
    finitary = "not strongly finitary" if condition.passed and factorization.fails else "inconclusive"
    report.add(Claim.check("verdict", finitary, "not strongly finitary", finitary == "not strongly finitary"))

    log_metric(0, "counterexample_d_Y", d_y)
    logger.info(f"Counter-example at eps={format_dist(eps)}: d_hat={format_dist(d_hat_x)}, d_Y={format_dist(d_y)}")
    return report
