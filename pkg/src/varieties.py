"""
Quantitative equations, variety presentations and finite quantitative algebras.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from .distances import INF, TOLERANCE, format_dist, leq, parse_dist
from .errors import ArityError, EvaluationError
from .spaces import FinMetricSpace
from .terms import (
    Leaf,
    Signature,
    Term,
    evaluate,
    format_term,
    leaves,
    parse_term,
    symbols_of,
)

# Configure logging for this module
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuantEquation:
    """t =_eps t' over a declared list of formal variables."""

    lhs: Term
    rhs: Term
    eps: float = 0.0
    variables: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError(f"Equation bound must be nonnegative, got {self.eps}")
        if not self.variables:
            found: List[str] = []
            for p in leaves(self.lhs) + leaves(self.rhs):
                if p not in found:
                    found.append(p)
            object.__setattr__(self, "variables", tuple(sorted(found, key=str)))
        else:
            object.__setattr__(self, "variables", tuple(self.variables))
            stray = [p for p in leaves(self.lhs) + leaves(self.rhs) if p not in self.variables]
            if stray:
                raise ValueError(f"Equation uses undeclared variable {stray[0]!r}")

    @property
    def is_ordinary(self) -> bool:
        return self.eps == 0

    def __str__(self) -> str:
        return f"{format_term(self.lhs)} =_{format_dist(self.eps)} {format_term(self.rhs)}"


@dataclass(frozen=True)
class VarietyPresentation:
    """A signature together with quantitative equations."""

    signature: Signature
    equations: Tuple[QuantEquation, ...] = ()
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        for eq in self.equations:
            for side in (eq.lhs, eq.rhs):
                _check_well_formed(side, self.signature)

    @property
    def is_ordinary(self) -> bool:
        return all(eq.is_ordinary for eq in self.equations)

    @property
    def label(self) -> str:
        return self.name or "custom"

    @classmethod
    def from_json(cls, data: Mapping[str, Any], name: Optional[str] = None) -> "VarietyPresentation":
        """
        Reads {"signature": {...}, "vars": [...], "equations": [{"lhs", "rhs", "eps"}]}.

        Raises:
            ValueError: On malformed JSON content, terms or bounds.
        """
        if not isinstance(data, Mapping) or "signature" not in data:
            raise ValueError("Variety JSON must be an object with a 'signature'")
        signature = Signature.from_json(data["signature"])
        variables = tuple(str(v) for v in data.get("vars", ()))
        equations = []
        for k, raw in enumerate(data.get("equations", [])):
            try:
                lhs = parse_term(raw["lhs"], signature)
                rhs = parse_term(raw["rhs"], signature)
                eps = parse_dist(raw.get("eps", 0))
            except KeyError as e:
                raise ValueError(f"Equation {k} is missing {e}") from None
            except ValueError as e:
                raise ValueError(f"Equation {k}: {e}") from e
            equations.append(QuantEquation(lhs, rhs, eps, variables))
        return cls(signature, tuple(equations), name or data.get("name"))

    def to_json(self) -> Dict[str, Any]:
        variables: List[str] = []
        for eq in self.equations:
            variables.extend(v for v in eq.variables if v not in variables)
        return {
            "name": self.label,
            "signature": self.signature.to_json(),
            "vars": variables,
            "equations": [
                {"lhs": format_term(eq.lhs), "rhs": format_term(eq.rhs),
                 "eps": "inf" if eq.eps == INF else eq.eps}
                for eq in self.equations
            ],
        }


def _check_well_formed(t: Term, signature: Signature) -> None:
    if isinstance(t, Leaf):
        return
    n = signature.arity(t.symbol)
    if n != len(t.children):
        raise ArityError(f"{t.symbol!r} has arity {n} but is applied to {len(t.children)} arguments")
    for c in t.children:
        _check_well_formed(c, signature)


class FiniteQuantAlgebra:
    """
    A finite metric carrier with tabulated operations.

    Operation tables map argument tuples (in carrier order) to carrier points.
    """

    def __init__(
        self,
        carrier: FinMetricSpace,
        signature: Signature,
        tables: Mapping[str, Mapping[Tuple[Hashable, ...], Hashable]],
        name: Optional[str] = None,
    ):
        self.carrier = carrier
        self.signature = signature
        self.name = name or "algebra"
        self._tables: Dict[str, Dict[Tuple[Hashable, ...], Hashable]] = {}
        for symbol, n in signature.ops:
            if symbol not in tables:
                raise ValueError(f"No table given for operation {symbol!r}")
            table = dict(tables[symbol])
            for args in itertools.product(carrier.points, repeat=n):
                if args not in table:
                    raise ValueError(f"Table of {symbol!r} is undefined on {args!r}")
                if table[args] not in carrier:
                    raise ValueError(f"Table of {symbol!r} maps {args!r} outside the carrier")
            self._tables[symbol] = table

    @classmethod
    def from_functions(
        cls,
        carrier: FinMetricSpace,
        signature: Signature,
        functions: Mapping[str, Callable[..., Hashable]],
        name: Optional[str] = None,
    ) -> "FiniteQuantAlgebra":
        tables = {
            symbol: {args: functions[symbol](*args) for args in itertools.product(carrier.points, repeat=n)}
            for symbol, n in signature.ops
        }
        return cls(carrier, signature, tables, name)

    @classmethod
    def from_json(cls, data: Mapping[str, Any], name: Optional[str] = None) -> "FiniteQuantAlgebra":
        """
        Reads {"carrier": <space>, "ops": {"mul": [[...], ...], "e": "p"}}.

        A string table is a constant, a list a unary table indexed in carrier order, a list of
        lists a binary table, and so on; an optional "signature" fixes arities explicitly.
        """
        if not isinstance(data, Mapping) or "carrier" not in data or "ops" not in data:
            raise ValueError("Algebra JSON must be an object with 'carrier' and 'ops'")
        carrier = FinMetricSpace.from_json(data["carrier"])
        raw_ops = data["ops"]
        if "signature" in data:
            signature = Signature.from_json(data["signature"])
        else:
            signature = Signature.of({sym: _nesting(table) for sym, table in raw_ops.items()})
        tables = {}
        for symbol, n in signature.ops:
            if symbol not in raw_ops:
                raise ValueError(f"No table given for operation {symbol!r}")
            tables[symbol] = _unfold(raw_ops[symbol], carrier.points, n, symbol)
        return cls(carrier, signature, tables, name or data.get("name"))

    def to_json(self) -> Dict[str, Any]:
        ops: Dict[str, Any] = {}
        for symbol, n in self.signature.ops:
            ops[symbol] = self._fold(symbol, (), n)
        return {"name": self.name, "carrier": self.carrier.to_json(), "ops": ops}

    def _fold(self, symbol: str, prefix: Tuple[Hashable, ...], remaining: int) -> Any:
        if remaining == 0:
            return self._tables[symbol][prefix]
        return [self._fold(symbol, prefix + (p,), remaining - 1) for p in self.carrier.points]

    def operate(self, symbol: str, args: Sequence[Hashable]) -> Hashable:
        table = self._tables.get(symbol)
        if table is None:
            raise EvaluationError(f"Algebra {self.name!r} does not interpret {symbol!r}")
        try:
            return table[tuple(args)]
        except KeyError:
            raise EvaluationError(f"{symbol!r} is undefined on {tuple(args)!r}") from None

    def dist(self, p: Hashable, q: Hashable) -> float:
        return self.carrier.dist(p, q)

    @property
    def points(self) -> Tuple[Hashable, ...]:
        return self.carrier.points


def _nesting(table: Any) -> int:
    n = 0
    while isinstance(table, list):
        n += 1
        if not table:
            break
        table = table[0]
    return n


def _unfold(table: Any, points: Sequence[Hashable], n: int, symbol: str) -> Dict[Tuple[Hashable, ...], Hashable]:
    if n == 0:
        if isinstance(table, list):
            raise ValueError(f"Constant {symbol!r} must be a single point")
        return {(): str(table)}
    if not isinstance(table, list) or len(table) != len(points):
        raise ValueError(f"Table of {symbol!r} must list one entry per carrier point")
    out: Dict[Tuple[Hashable, ...], Hashable] = {}
    for p, sub in zip(points, table):
        for args, value in _unfold(sub, points, n - 1, symbol).items():
            out[(p,) + args] = value
    return out


# --- Checks ---


@dataclass(frozen=True)
class NonexpansionReport:
    """Outcome of the nonexpansiveness check; the witness fields are set on failure."""

    passed: bool
    symbol: Optional[str] = None
    args: Optional[Tuple[Hashable, ...]] = None
    other_args: Optional[Tuple[Hashable, ...]] = None
    input_distance: Optional[float] = None
    output_distance: Optional[float] = None


def max_distance(space: Any, xs: Sequence[Hashable], ys: Sequence[Hashable]) -> float:
    """Max metric on powers; the empty tuple has distance 0."""
    return max((space.dist(x, y) for x, y in zip(xs, ys)), default=0.0)


def check_nonexpanding(algebra: FiniteQuantAlgebra, tol: float = TOLERANCE) -> NonexpansionReport:
    """Checks every operation against every pair of argument tuples; reports the first violation."""
    carrier = algebra.carrier
    for symbol, n in algebra.signature.ops:
        if n == 0:
            continue
        tuples = list(itertools.product(carrier.points, repeat=n))
        for xs, ys in itertools.combinations(tuples, 2):
            d_in = max_distance(carrier, xs, ys)
            d_out = carrier.dist(algebra.operate(symbol, xs), algebra.operate(symbol, ys))
            if not leq(d_out, d_in, tol):
                logger.debug(f"{symbol} expands {xs} / {ys}: {d_in} -> {d_out}")
                return NonexpansionReport(False, symbol, xs, ys, d_in, d_out)
    return NonexpansionReport(True)


@dataclass(frozen=True)
class SatisfactionResult:
    equation: QuantEquation
    holds: bool
    worst_distance: float
    witness: Optional[Dict[str, Hashable]]


def satisfies(algebra: FiniteQuantAlgebra, equation: QuantEquation, tol: float = TOLERANCE) -> SatisfactionResult:
    """
    Tries every interpretation of the equation's variables in the carrier.

    Returns:
        Whether every interpretation keeps the two sides within eps, with the first
        interpretation attaining the largest distance as witness.

    Raises:
        EvaluationError: If the algebra does not interpret a symbol of the equation.
    """
    for symbol in symbols_of(equation.lhs) + symbols_of(equation.rhs):
        if symbol not in algebra.signature:
            raise EvaluationError(f"Algebra {algebra.name!r} does not interpret {symbol!r}")
    worst = -1.0
    witness: Optional[Dict[str, Hashable]] = None
    for values in itertools.product(algebra.carrier.points, repeat=len(equation.variables)):
        env = dict(zip(equation.variables, values))
        d = algebra.dist(evaluate(equation.lhs, algebra, env), evaluate(equation.rhs, algebra, env))
        if d > worst:
            worst, witness = d, env
    if witness is None:
        return SatisfactionResult(equation, True, 0.0, None)
    return SatisfactionResult(equation, leq(worst, equation.eps, tol), worst, witness)


@dataclass(frozen=True)
class SatisfactionReport:
    results: Tuple[SatisfactionResult, ...]
    nonexpansion: NonexpansionReport

    @property
    def passed(self) -> bool:
        return self.nonexpansion.passed and all(r.holds for r in self.results)


def satisfies_all(algebra: FiniteQuantAlgebra, variety: VarietyPresentation) -> SatisfactionReport:
    """Nonexpansiveness plus every equation of the presentation, with per-equation witnesses."""
    results = tuple(satisfies(algebra, eq) for eq in variety.equations)
    report = SatisfactionReport(results, check_nonexpanding(algebra))
    logger.info(
        f"Algebra {algebra.name!r} against {variety.label!r}: "
        f"{sum(r.holds for r in results)}/{len(results)} equations hold"
    )
    return report
