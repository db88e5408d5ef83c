"""
Built-in variety presentations and resolution of variety names.

Names: "monoid", "semilattice", "action:<monoid-file>", "two-eps-ops:<eps>", "small:<eps>",
"exceptions:<space-file>", or a path to a variety JSON file.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

from .distances import INF, format_dist, parse_dist
from .errors import PreconditionError
from .spaces import FinMetricSpace
from .terms import Node, Signature, formal_variable
from .utils import load_json_file
from .varieties import FiniteQuantAlgebra, QuantEquation, VarietyPresentation, satisfies_all

# Configure logging for this module
logger = logging.getLogger(__name__)

X0, X1, X2 = formal_variable(0), formal_variable(1), formal_variable(2)


def monoid() -> VarietyPresentation:
    sig = Signature.of({"mul": 2, "e": 0})
    e = Node("e", ())
    return VarietyPresentation(sig, (
        QuantEquation(Node("mul", (X0, Node("mul", (X1, X2)))), Node("mul", (Node("mul", (X0, X1)), X2))),
        QuantEquation(Node("mul", (e, X0)), X0),
        QuantEquation(Node("mul", (X0, e)), X0),
    ), "monoid")


def semilattice() -> VarietyPresentation:
    """Join-semilattices with a bottom: associativity, commutativity, idempotence and unit."""
    sig = Signature.of({"join": 2, "bot": 0})
    bot = Node("bot", ())
    return VarietyPresentation(sig, (
        QuantEquation(Node("join", (X0, Node("join", (X1, X2)))), Node("join", (Node("join", (X0, X1)), X2))),
        QuantEquation(Node("join", (X0, X1)), Node("join", (X1, X0))),
        QuantEquation(Node("join", (X0, X0)), X0),
        QuantEquation(Node("join", (bot, X0)), X0),
    ), "semilattice")


def check_monoid(m: FiniteQuantAlgebra) -> None:
    """
    Raises:
        PreconditionError: If m is not a quantitative monoid with operations mul and e.
    """
    if "mul" not in m.signature or "e" not in m.signature:
        raise PreconditionError(f"Monoid {m.name!r} must interpret 'mul' and 'e'")
    report = satisfies_all(m, monoid())
    if not report.nonexpansion.passed:
        raise PreconditionError(f"Monoid {m.name!r} has an expanding operation {report.nonexpansion.symbol!r}")
    failed = [r for r in report.results if not r.holds]
    if failed:
        raise PreconditionError(
            f"Monoid {m.name!r} violates {failed[0].equation} at {failed[0].witness}"
        )


def action(m: FiniteQuantAlgebra) -> VarietyPresentation:
    """
    Actions of a finite quantitative monoid: one unary symbol per monoid element, named by it.

    Equations: m(m'(x0)) = (m m')(x0), e(x0) = x0 and m(x0) =_{d(m, m')} m'(x0).
    """
    check_monoid(m)
    points = m.carrier.points
    sig = Signature.of({str(p): 1 for p in points})
    unit = m.operate("e", ())
    equations = []
    for p, q in itertools.product(points, repeat=2):
        pq = m.operate("mul", (p, q))
        equations.append(QuantEquation(Node(str(p), (Node(str(q), (X0,)),)), Node(str(pq), (X0,))))
    equations.append(QuantEquation(Node(str(unit), (X0,)), X0))
    for p, q in itertools.combinations(points, 2):
        d = m.dist(p, q)
        if d < INF:
            equations.append(QuantEquation(Node(str(p), (X0,)), Node(str(q), (X0,)), d))
    return VarietyPresentation(sig, tuple(equations), f"action:{m.name}")


def two_eps_ops(eps: float) -> VarietyPresentation:
    """Two binary operations that are eps-close: sigma1(x0, x1) =_eps sigma2(x0, x1)."""
    sig = Signature.of({"sigma1": 2, "sigma2": 2})
    return VarietyPresentation(sig, (
        QuantEquation(Node("sigma1", (X0, X1)), Node("sigma2", (X0, X1)), eps),
    ), f"two-eps-ops:{format_dist(eps)}")


def small(eps: float) -> VarietyPresentation:
    """Spaces of diameter at most eps: no operations, x0 =_eps x1."""
    return VarietyPresentation(Signature(()), (QuantEquation(X0, X1, eps),), f"small:{format_dist(eps)}")


def exceptions(space: FinMetricSpace) -> VarietyPresentation:
    """One constant per exception, with e =_{d(e, e')} e' for every finite distance."""
    sig = Signature.of({str(p): 0 for p in space.points})
    equations = []
    for p, q in itertools.combinations(space.points, 2):
        d = space.dist(p, q)
        if d < INF:
            equations.append(QuantEquation(Node(str(p), ()), Node(str(q), ()), d))
    return VarietyPresentation(sig, tuple(equations), "exceptions")


@dataclass(frozen=True)
class ResolvedVariety:
    """A presentation together with the parameters its closed-form model needs."""

    kind: str
    presentation: VarietyPresentation
    eps: Optional[float] = None
    monoid: Optional[FiniteQuantAlgebra] = None
    exceptions: Optional[FinMetricSpace] = None


def resolve_variety(spec: str) -> ResolvedVariety:
    """
    Resolves a built-in variety name or a variety JSON file.

    Raises:
        ValueError: On an unknown name, a malformed parameter or an invalid file.
        FileNotFoundError: If a referenced file does not exist.
    """
    name, _, arg = spec.partition(":")
    if name == "monoid" and not arg:
        return ResolvedVariety("monoid", monoid())
    if name == "semilattice" and not arg:
        return ResolvedVariety("semilattice", semilattice())
    if name == "action" and arg:
        m = FiniteQuantAlgebra.from_json(load_json_file(arg), name=arg)
        return ResolvedVariety("action", action(m), monoid=m)
    if name == "two-eps-ops" and arg:
        eps = parse_dist(arg)
        return ResolvedVariety("two-eps-ops", two_eps_ops(eps), eps=eps)
    if name == "small" and arg:
        eps = parse_dist(arg)
        return ResolvedVariety("small", small(eps), eps=eps)
    if name == "exceptions" and arg:
        space = FinMetricSpace.from_json(load_json_file(arg))
        return ResolvedVariety("exceptions", exceptions(space), exceptions=space)
    if spec.endswith(".json"):
        presentation = VarietyPresentation.from_json(load_json_file(spec), name=spec)
        logger.info(f"Loaded variety {spec} with {len(presentation.equations)} equations")
        return ResolvedVariety("file", presentation)
    raise ValueError(
        f"Unknown variety {spec!r}: expected monoid, semilattice, action:<file>, "
        "two-eps-ops:<eps>, small:<eps>, exceptions:<file> or a .json file"
    )
