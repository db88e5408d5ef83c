"""
Runnable law suites for free-algebra models: monad laws on finite samples, enrichment,
functoriality on surjections, and the universal property against small algebras.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .distances import format_dist, leq
from .errors import TruncationError
from .models.base import Element, FreeAlgebraModel
from .models.closed_forms import SmallSpaceModel
from .models.term_models import TermModelBase
from .reports import Claim, Report
from .spaces import FinMetricSpace, hom_distance, is_nonexpanding, sum_tensor
from .terms import Leaf, Node, evaluate, flatten, relabel
from .varieties import FiniteQuantAlgebra, max_distance

# Configure logging for this module
logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_SIZE = 12

# Bases up to this many points get every argument tuple checked for nonexpansion.
EXHAUSTIVE_POINTS = 4

# Above this many tuple pairs the exhaustive check takes its arguments one level shallower.
EXHAUSTIVE_PAIR_LIMIT = 200_000

# Exhaustive uniqueness search is skipped above this many candidate maps.
UNIQUENESS_SEARCH_LIMIT = 4096

# Bound on the tuples combined per symbol when building nested terms for associativity.
NESTING_FANOUT = 64


@dataclass(frozen=True)
class MapPair:
    """Two maps X -> target compared by the enrichment law."""

    f: Mapping[Hashable, Hashable]
    g: Mapping[Hashable, Hashable]
    target: FinMetricSpace
    label: str = ""


def default_map_pairs(space: FinMetricSpace) -> List[MapPair]:
    """The identity against each constant map, and the constant maps against each other."""
    identity = {p: p for p in space.points}
    constants = {p: {x: p for x in space.points} for p in space.points}
    pairs = [MapPair(identity, constants[p], space, f"id vs const {p}") for p in space.points]
    for p, q in itertools.combinations(space.points, 2):
        pairs.append(MapPair(constants[p], constants[q], space, f"const {p} vs const {q}"))
    return pairs


def _sample(model: FreeAlgebraModel, elements: Sequence[Element], size: int) -> List[Element]:
    units = [model.unit(x) for x in model.base.points]
    ordered = list(dict.fromkeys(list(units) + list(elements)))
    return ordered[:max(size, len(units))]


def _operation_arguments(
    model: FreeAlgebraModel, elements: Sequence[Element], depth: int, sample: Sequence[Element]
) -> List[Element]:
    """
    Arguments for the nonexpansion check.

    On small bases this is the whole universe, or, when that gives too many tuple pairs,
    the universe one level shallower: every application whose result stays in the swept
    universe. Larger bases use the sample.
    """
    if len(model.base) > EXHAUSTIVE_POINTS:
        return list(sample)
    arity = max((n for _, n in model.signature.ops), default=0)
    if depth == 0 or math.comb(len(elements) ** arity, 2) <= EXHAUSTIVE_PAIR_LIMIT:
        return list(elements)
    return model.element_universe(depth - 1)


def _operations_nonexpanding(model: FreeAlgebraModel, arguments: Sequence[Element]) -> Claim:
    checked = 0
    for symbol, n in model.signature.ops:
        if n == 0:
            continue
        results = {}
        for args in itertools.product(arguments, repeat=n):
            try:
                results[args] = model.operate(symbol, args)
            except TruncationError:
                continue
        for (xs, rx), (ys, ry) in itertools.combinations(results.items(), 2):
            checked += 1
            d_in = max_distance(model, xs, ys)
            d_out = model.distance(rx, ry)
            if not leq(d_out, d_in):
                return Claim.check(
                    "operations nonexpanding", d_out, f"<= {format_dist(d_in)}", False,
                    {"symbol": symbol, "args": [model.format_element(a) for a in xs],
                     "other_args": [model.format_element(a) for a in ys]},
                )
    return Claim.check("operations nonexpanding", f"{checked} tuple pairs", "no violation", True)


def _unit_laws(model: FreeAlgebraModel, sample: Sequence[Element]) -> List[Claim]:
    """mu . eta_T = id and mu . T eta = id over the sampled elements."""
    outer = model.over(model.as_space(sample))
    failures_left: List[str] = []
    failures_right: List[str] = []
    for s in sample:
        if model.multiply(outer.unit(s)) != s:
            failures_left.append(model.format_element(s))
        try:
            lifted = model.map_element(s, model.unit, outer)
        except TruncationError:
            continue
        if model.multiply(lifted) != s:
            failures_right.append(model.format_element(s))
    return [
        Claim.check("mu . eta_T = id", len(failures_left), 0, not failures_left, failures_left[:1] or None),
        Claim.check("mu . T eta = id", len(failures_right), 0, not failures_right, failures_right[:1] or None),
    ]


def _nest(symbols: Sequence[Tuple[str, int]], inner: Sequence[Any]) -> List[Node]:
    """Leaves over the inner values plus one layer of every symbol over them."""
    out: List[Any] = [Leaf(v) for v in inner]
    for symbol, n in symbols:
        combos = itertools.islice(itertools.product(inner, repeat=n), NESTING_FANOUT)
        out.extend(Node(symbol, tuple(Leaf(v) for v in combo)) for combo in combos)
    return out


def _term_associativity(model: TermModelBase, sample: Sequence[Element]) -> Claim:
    """mu . mu_T = mu . T mu on terms over terms over terms."""
    ops = model.signature.ops
    level2 = _nest(ops, sample[:3])
    level3 = _nest(ops, level2[:4])
    checked = 0
    for t in level3:
        checked += 1
        if flatten(flatten(t)) != flatten(relabel(t, flatten)):
            return Claim.check("mu associative", "mismatch", "equal", False, t)
    return Claim.check("mu associative", f"{checked} nested terms", "equal", True)


def _enrichment(model: FreeAlgebraModel, elements: Sequence[Element], pairs: Sequence[MapPair]) -> List[Claim]:
    """d(T f s, T g s) <= sup_x d(f x, g x) over every element."""
    claims = []
    for k, pair in enumerate(pairs):
        bound = hom_distance(pair.f, pair.g, model.base.points, pair.target)
        target = model.over(pair.target)
        worst, witness = 0.0, None
        for s in elements:
            try:
                d = target.distance(model.map_element(s, pair.f, target), model.map_element(s, pair.g, target))
            except TruncationError:
                continue
            if d > worst:
                worst, witness = d, s
        label = pair.label or f"pair {k}"
        ok = leq(worst, bound)
        claims.append(Claim.check(
            f"enrichment ({label})", worst, f"<= {format_dist(bound)}", ok,
            model.format_element(witness) if witness is not None and not ok else None,
        ))
    return claims


def _surjectivity(model: FreeAlgebraModel, depth: int, elements: Sequence[Element]) -> Claim:
    """T of the collapse onto the first point reaches every element over the one-point space."""
    p0 = model.base.points[0]
    point = FinMetricSpace((p0,), np.zeros((1, 1)))
    collapse = {x: p0 for x in model.base.points}
    target = model.over(point)
    image = set()
    for s in elements:
        try:
            image.add(model.map_element(s, collapse, target))
        except TruncationError:
            continue
    missing = [e for e in target.element_universe(depth) if e not in image]
    return Claim.check(
        "T preserves surjections", len(missing), 0, not missing,
        target.format_element(missing[0]) if missing else None,
    )


def _idempotence(model: SmallSpaceModel) -> Claim:
    twice = model.over(model.space)
    points = model.base.points
    worst = 0.0
    for p, q in itertools.combinations(points, 2):
        d_twice, d_once = twice.distance(p, q), model.distance(p, q)
        if d_twice != d_once:
            worst = max(worst, abs(d_twice - d_once))
    return Claim.distance("applying twice equals applying once", worst, 0.0)


def monad_law_suite(
    model: FreeAlgebraModel,
    map_pairs: Optional[Sequence[MapPair]] = None,
    depth: int = 2,
    sample_size: int = DEFAULT_SAMPLE_SIZE,
) -> Report:
    """
    Runs every applicable law against a model and collects the results.

    Args:
        model: The model under test.
        map_pairs: Maps for the enrichment law; defaults to identity and constant maps into the base.
        depth: Depth of the element universe the laws sweep.
        sample_size: Elements used for the laws that build the model over the model.

    Returns:
        A report with one claim per law (one per map pair for enrichment).
    """
    elements = model.element_universe(depth)
    sample = _sample(model, elements, sample_size)
    base = model.base
    arguments = _operation_arguments(model, elements, depth, sample)
    report = Report("laws", {
        "model": model.name, "depth": depth, "elements": len(elements), "sample": len(sample),
        "operation_arguments": len(arguments),
    })

    unit_witness = is_nonexpanding({x: model.unit(x) for x in base.points}, base, model)
    report.add(Claim.check(
        "unit nonexpanding", unit_witness is None, True, unit_witness is None,
        None if unit_witness is None else [unit_witness.p, unit_witness.q, unit_witness.target_distance],
    ))
    report.add(_operations_nonexpanding(model, arguments))
    if model.supports_multiply:
        report.extend(_unit_laws(model, sample))
    if isinstance(model, TermModelBase):
        report.add(_term_associativity(model, sample))
    report.extend(_enrichment(model, elements, map_pairs if map_pairs is not None else default_map_pairs(base)))
    report.add(_surjectivity(model, depth, elements))
    if isinstance(model, SmallSpaceModel):
        report.add(_idempotence(model))
    logger.info(f"Law suite for {model.name}: {len(report.failures())}/{len(report.claims)} failures")
    return report


# --- Universal property ---


def nonexpanding_maps(source: FinMetricSpace, target: FinMetricSpace) -> List[Dict[Hashable, Hashable]]:
    """Every nonexpanding map between two finite spaces, in lexicographic order."""
    maps = []
    for values in itertools.product(target.points, repeat=len(source.points)):
        f = dict(zip(source.points, values))
        if is_nonexpanding(f, source, target) is None:
            maps.append(f)
    return maps


def _is_homomorphism(
    model: FreeAlgebraModel, algebra: FiniteQuantAlgebra, h: Mapping[Element, Hashable], elements: Sequence[Element]
) -> Optional[Tuple[str, Tuple[Element, ...]]]:
    for symbol, n in model.signature.ops:
        for args in itertools.product(elements, repeat=n):
            try:
                result = model.operate(symbol, args)
            except TruncationError:
                continue
            if result not in h:
                continue
            if h[result] != algebra.operate(symbol, [h[a] for a in args]):
                return symbol, args
    return None


def check_freeness(model: FreeAlgebraModel, algebra: FiniteQuantAlgebra, depth: int = 2) -> Report:
    """
    Spot-checks the universal property of a model against a finite algebra.

    Every nonexpanding f: X -> A is extended along the representatives; the extension must
    agree with f on units, commute with the operations, be nonexpanding and be the only
    homomorphism doing so.
    """
    elements = model.element_universe(depth)
    maps = nonexpanding_maps(model.base, algebra.carrier)
    report = Report("freeness", {"model": model.name, "algebra": algebra.name, "depth": depth,
                                 "elements": len(elements), "maps": len(maps)})
    bad_unit = bad_hom = bad_nonexp = None
    non_unique = None
    searched = len(algebra.points) ** len(elements) <= UNIQUENESS_SEARCH_LIMIT
    for f in maps:
        extension = {s: evaluate(model.representative(s), algebra, f) for s in elements}
        if bad_unit is None and any(extension[model.unit(x)] != f[x] for x in model.base.points):
            bad_unit = f
        if bad_hom is None:
            failure = _is_homomorphism(model, algebra, extension, elements)
            if failure is not None:
                bad_hom = {"map": f, "symbol": failure[0], "args": [model.format_element(a) for a in failure[1]]}
        if bad_nonexp is None:
            witness = is_nonexpanding(extension, model, algebra.carrier, points=elements)
            if witness is not None:
                bad_nonexp = {
                    "map": f,
                    "pair": [model.format_element(witness.p), model.format_element(witness.q)],
                    "d_model": witness.source_distance,
                    "d_algebra": witness.target_distance,
                }
        if searched and non_unique is None:
            count = 0
            for values in itertools.product(algebra.points, repeat=len(elements)):
                h = dict(zip(elements, values))
                if all(h[model.unit(x)] == f[x] for x in model.base.points) and \
                        _is_homomorphism(model, algebra, h, elements) is None:
                    count += 1
            if count != 1:
                non_unique = {"map": f, "homomorphisms": count}

    report.add(Claim.check("extension restricts to f on units", bad_unit is None, True, bad_unit is None, bad_unit))
    report.add(Claim.check("extension is a homomorphism", bad_hom is None, True, bad_hom is None, bad_hom))
    report.add(Claim.check("extension is nonexpanding", bad_nonexp is None, True, bad_nonexp is None, bad_nonexp))
    if searched:
        report.add(Claim.check("extension is unique", non_unique is None, True, non_unique is None, non_unique))
    return report


def tensor_action_algebra(monoid_algebra: FiniteQuantAlgebra, space: FinMetricSpace, model: FreeAlgebraModel) -> FiniteQuantAlgebra:
    """
    The action of M on M x X with the sum metric, as an algebra for the model's signature.

    Unary symbols are the monoid's elements written as strings.
    """
    carrier = sum_tensor(monoid_algebra.carrier, space)
    by_symbol = {str(m): m for m in monoid_algebra.points}
    functions = {
        symbol: (lambda pair, m=by_symbol[symbol]: (monoid_algebra.operate("mul", (m, pair[0])), pair[1]))
        for symbol, _ in model.signature.ops
    }
    return FiniteQuantAlgebra.from_functions(carrier, model.signature, functions, "M (x) X")
