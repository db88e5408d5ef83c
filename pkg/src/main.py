#!/usr/bin/env python
"""
CLI entry point for the quantitative algebra toolkit.

Exit codes: 0 when every claim of the report holds, 1 when a check or reproduction fails,
2 on usage, input or validation errors.
"""

import argparse
import itertools
import logging
import sys
from typing import List, Optional, Sequence, Tuple

from . import errors
from .closure import chain_infimum, meet
from .colimits import chain_colimit_distance, chain_from_json
from .config import RunConfig
from .distances import format_dist, parse_dist
from .finitarity import (
    ComparisonMeetSpace,
    SkeletonMeetSpace,
    check_condition,
    check_factorization,
    expected_factorization,
    run_counterexample,
)
from .laws import monad_law_suite
from .log_setup import setup_logging
from .models.base import FreeAlgebraModel
from .models.registry import MODEL_ALIASES, build_model, build_model_pair
from .presentations import resolve_variety
from .reports import Claim, DistanceTable, Report
from .spaces import FinMetricSpace, FinPseudoSpace, validate_pseudometric
from .utils import load_json_file, split_top_level, write_output
from .varieties import FiniteQuantAlgebra, satisfies_all

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

# Brute-force chain enumeration in the meet command is limited to this many points.
BRUTE_FORCE_POINTS = 6


class UsageError(ValueError):
    """Raised by the argument parser instead of exiting."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _eps_grid(text: str) -> Tuple[float, ...]:
    return tuple(parse_dist(part) for part in split_top_level(text))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=["json", "csv", "text"], default="json", help="Report format.")
    parser.add_argument("--output", type=str, default=None, help="Write the report to a file instead of stdout.")
    parser.add_argument("--log-dir", type=str, default=None, help="Directory for the run log file.")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level on stderr.")
    parser.add_argument(
        "--universe-cap",
        type=int,
        default=None,
        help="Term-universe size guard (defaults to $QALG_UNIVERSE_CAP, ~/.qalg-universe-cap or 1000000).",
    )


def _add_model_options(parser: argparse.ArgumentParser, depth_default: int = 3) -> None:
    parser.add_argument("--space", type=str, required=True, help="Base space JSON file.")
    parser.add_argument("--model", choices=["closed", "generic"], default="closed",
                        help="Closed-form model or the bounded generic construction.")
    parser.add_argument("--max-depth", type=int, default=depth_default, help="Depth budget.")
    parser.add_argument("--max-len", type=int, default=3, help="Word length bound for monoids.")
    parser.add_argument("--action-metric", choices=["max", "sum"], default="max",
                        help="Metric of the monoid-action closed form.")
    parser.add_argument("--small-bound", choices=["max", "min"], default="max",
                        help="Distance bound of the bounded-diameter closed form.")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qalg", description="Quantitative algebras over finite extended metric spaces.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("counterexample", help="Reproduce the two eps-close operations counter-example.")
    p.add_argument("--eps", type=float, required=True, help="Closeness bound, 0 < eps < 1.")
    p.add_argument("--max-depth", type=int, default=2, help="Depth of the certified universe (>= 2).")
    p.add_argument("--eps-grid", type=_eps_grid, default=(0.25, 0.5, 1.0), help="Comma-separated eps values.")
    _add_common(p)

    p = sub.add_parser("free", help="Distances in a free algebra.")
    p.add_argument("--variety", type=str, required=True, help="Built-in variety name or variety JSON file.")
    p.add_argument("--pairs", type=str, default=None, help="Element pairs 'x,y;u,v'; omit for the full table.")
    _add_model_options(p)
    _add_common(p)

    p = sub.add_parser("meet", help="Meet of two pseudometrics on the same points.")
    p.add_argument("--left", type=str, required=True, help="First space JSON file.")
    p.add_argument("--right", type=str, required=True, help="Second space JSON file.")
    _add_common(p)

    p = sub.add_parser("check", help="Check a finite algebra against a variety.")
    p.add_argument("--algebra", type=str, required=True, help="Algebra JSON file.")
    p.add_argument("--variety", type=str, required=True, help="Built-in variety name or variety JSON file.")
    _add_common(p)

    p = sub.add_parser("laws", help="Run the monad law suite against a model.")
    p.add_argument("--monad", type=str, required=True, help="word, hausdorff or any variety name or file.")
    _add_model_options(p, depth_default=2)
    _add_common(p)

    p = sub.add_parser("colimit", help="Distances along a directed chain.")
    p.add_argument("--chain", type=str, required=True, help="Chain JSON file.")
    p.add_argument("--stages", type=int, default=None, help="Truncate or generate this many stages.")
    p.add_argument("--pair", type=str, required=True, help="Two points 'a,b' of the starting stage.")
    p.add_argument("--stage", type=int, default=0, help="Starting stage index.")
    _add_common(p)

    for name, text in (("condition", "Sweep condition (cond)."), ("factorize", "Probe the factorization.")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--variety", type=str, required=True, help="Built-in variety name or variety JSON file.")
        p.add_argument("--target", choices=["canonical", "meet"], default="canonical",
                       help="Target space: the meet of the model over |X| with the d* lift, or the exact "
                            "skeleton meet space (two-eps-ops only).")
        p.add_argument("--eps-grid", type=_eps_grid, default=(0.25, 0.5, 1.0), help="Comma-separated eps values.")
        _add_model_options(p, depth_default=2)
        _add_common(p)
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        eps=getattr(args, "eps", None),
        max_depth=getattr(args, "max_depth", 2),
        max_len=getattr(args, "max_len", 3),
        stages=getattr(args, "stages", None),
        eps_grid=getattr(args, "eps_grid", (0.25, 0.5, 1.0)),
        output_format_str=args.format,
        output_path=args.output,
        log_dir=args.log_dir,
        verbose=args.verbose,
        universe_cap=args.universe_cap,
    )


def _load_space(path: str) -> FinMetricSpace:
    return FinMetricSpace.from_json(load_json_file(path))


def _model_for(args: argparse.Namespace, config: RunConfig, variety_spec: str):
    variety = resolve_variety(MODEL_ALIASES.get(variety_spec, variety_spec))
    options = dict(
        construction=args.model,
        max_depth=config.max_depth,
        max_len=config.max_len,
        action_metric=args.action_metric,
        small_bound=args.small_bound,
        cap=config.resolved_universe_cap,
    )
    return variety, options


def _parse_pairs(model: FreeAlgebraModel, text: str) -> List[Tuple[object, object]]:
    pairs = []
    for item in split_top_level(text, ";"):
        parts = split_top_level(item)
        if len(parts) != 2:
            raise ValueError(f"Expected a pair 'x,y', got {item!r}")
        pairs.append((model.parse_element(parts[0]), model.parse_element(parts[1])))
    return pairs


# --- Subcommands ---


def cmd_counterexample(args: argparse.Namespace, config: RunConfig) -> Report:
    return run_counterexample(config.eps, config.max_depth, config.eps_grid)


def cmd_free(args: argparse.Namespace, config: RunConfig) -> Report:
    space = _load_space(args.space)
    variety, options = _model_for(args, config, args.variety)
    model = build_model(variety, space, **options)
    report = Report("free", {"variety": variety.presentation.label, "model": model.name, "space": args.space})
    if args.pairs:
        rows = []
        for s, t in _parse_pairs(model, args.pairs):
            rows.append((model.format_element(s), model.format_element(t), model.distance(s, t)))
        report.table = DistanceTable(pairs=rows)
        return report
    elements = model.element_universe(config.max_depth)
    labels = [model.format_element(e) for e in elements]
    report.table = DistanceTable(labels=labels, matrix=model.distance_table(elements).tolist())
    return report


def cmd_meet(args: argparse.Namespace, config: RunConfig) -> Report:
    left = FinPseudoSpace.from_json(load_json_file(args.left))
    right = FinPseudoSpace.from_json(load_json_file(args.right))
    result = meet(left, right)
    report = Report("meet", {"left": args.left, "right": args.right, "points": len(result)})
    points = result.points
    aligned = left.aligned_matrix(right)

    above = [(p, q) for i, p in enumerate(points) for j, q in enumerate(points)
             if result.matrix[i, j] > min(left.matrix[i, j], aligned[i, j])]
    report.add(Claim.check("meet below both arguments", len(above), 0, not above, above[:1] or None))
    try:
        validate_pseudometric(result)
        report.add(Claim.check("meet is a pseudometric", True, True, True))
    except errors.MetricValidationError as e:
        report.add(Claim.check("meet is a pseudometric", False, True, False, str(e)))

    if len(points) <= BRUTE_FORCE_POINTS:
        pointwise = {(p, q): min(left.dist(p, q), right.dist(p, q)) for p in points for q in points}
        mismatches = []
        for p, q in itertools.combinations(points, 2):
            brute = chain_infimum(lambda a, b: pointwise[(a, b)], points, p, q, max(len(points) - 1, 1))
            if brute != result.dist(p, q):
                mismatches.append([p, q, brute, result.dist(p, q)])
        report.add(Claim.check("meet equals the brute-force chain infimum", len(mismatches), 0,
                               not mismatches, mismatches[:1] or None))
    report.table = DistanceTable(labels=[str(p) for p in points], matrix=result.matrix.tolist())
    return report


def cmd_check(args: argparse.Namespace, config: RunConfig) -> Report:
    algebra = FiniteQuantAlgebra.from_json(load_json_file(args.algebra), name=args.algebra)
    variety = resolve_variety(args.variety)
    outcome = satisfies_all(algebra, variety.presentation)
    report = Report("check", {"algebra": algebra.name, "variety": variety.presentation.label})
    nonexp = outcome.nonexpansion
    witness = None
    if not nonexp.passed:
        witness = {"symbol": nonexp.symbol, "args": nonexp.args, "other_args": nonexp.other_args,
                   "input_distance": nonexp.input_distance, "output_distance": nonexp.output_distance}
    report.add(Claim.check("operations nonexpanding", nonexp.passed, True, nonexp.passed, witness))
    for result in outcome.results:
        report.add(Claim.check(
            str(result.equation), result.worst_distance, f"<= {format_dist(result.equation.eps)}",
            result.holds, None if result.holds else result.witness,
        ))
    return report


def cmd_laws(args: argparse.Namespace, config: RunConfig) -> Report:
    space = _load_space(args.space)
    variety, options = _model_for(args, config, args.monad)
    model = build_model(variety, space, **options)
    return monad_law_suite(model, depth=config.max_depth)


def cmd_colimit(args: argparse.Namespace, config: RunConfig) -> Report:
    data = load_json_file(args.chain)
    chain = chain_from_json(data, stages=config.stages, source=args.chain)
    parts = split_top_level(args.pair)
    if len(parts) != 2:
        raise ValueError(f"Expected a pair 'a,b', got {args.pair!r}")
    result = chain_colimit_distance(chain, args.stage, parts[0], parts[1])
    report = Report("colimit", {"chain": args.chain, "stages": len(chain), "pair": parts, "start": args.stage})
    increasing = [k for k in range(1, len(result.values)) if result.values[k] > result.values[k - 1]]
    report.add(Claim.check("stage distances nonincreasing", len(increasing), 0, not increasing))
    if data.get("generator") == "halving":
        last = len(chain)
        report.add(Claim.distance(f"stage {last} distance", result.values[-1], 2.0 ** -last, tol=0))
        report.add(Claim.check("trend", result.trend, "→ 0", result.collapses))
    else:
        report.add(Claim.check("trend", result.trend, result.trend, True))
    report.add(Claim.check("colimit distance bound", result.infimum, result.infimum, True))
    report.table = DistanceTable(pairs=[
        (f"stage {args.stage + k + 1}", ",".join(parts), d) for k, d in enumerate(result.values)
    ])
    return report


def _probe_setup(args: argparse.Namespace, config: RunConfig):
    space = _load_space(args.space)
    variety, options = _model_for(args, config, args.variety)
    model_discrete, model = build_model_pair(variety, space, **options)
    if args.target == "meet":
        if variety.kind != "two-eps-ops":
            raise ValueError("--target meet is only defined for two-eps-ops varieties")
        target = SkeletonMeetSpace(space, variety.eps)
    else:
        target = ComparisonMeetSpace(model_discrete, space, config.max_depth)
    return space, variety, model_discrete, model, target


def cmd_condition(args: argparse.Namespace, config: RunConfig) -> Report:
    space, _, model_discrete, model, target = _probe_setup(args, config)
    result = check_condition(model_discrete, space, lambda e: e, target, config.eps_grid, config.max_depth)
    report = Report("condition", {"model": model.name, "target": args.target, "max_depth": config.max_depth})
    for eps, worst, count, ok, witness in zip(result.eps_values, result.maxima, result.pairs_checked,
                                              result.passed_per_eps, result.witnesses):
        report.add(Claim.check(
            f"condition (cond) at eps={format_dist(eps)} over {count} terms", worst, f"<= {format_dist(eps)}",
            ok, None if ok else [model_discrete.format_element(w) for w in witness],
        ))
    return report


def cmd_factorize(args: argparse.Namespace, config: RunConfig) -> Report:
    space, variety, model_discrete, model, target = _probe_setup(args, config)
    verdict = check_factorization(model_discrete, model, lambda e: e, target, config.max_depth)
    report = Report("factorize", {
        "model": model.name, "target": args.target, "max_depth": config.max_depth,
        "pairs_checked": verdict.pairs_checked,
    })
    witness = None
    if verdict.witness is not None:
        witness = {
            "pair": [model.format_element(e) for e in verdict.witness],
            "d_model": verdict.model_distance,
            "d_target": verdict.target_distance,
        }
    expected = expected_factorization(variety.kind)
    report.add(Claim.check("factorization through T i_X", verdict.verdict, expected, verdict.verdict == expected,
                           witness))
    report.add(Claim.check("T i_X surjective on the universe", verdict.comparison_surjective, True,
                           verdict.comparison_surjective))
    return report


COMMANDS = {
    "counterexample": cmd_counterexample,
    "free": cmd_free,
    "meet": cmd_meet,
    "check": cmd_check,
    "laws": cmd_laws,
    "colimit": cmd_colimit,
    "condition": cmd_condition,
    "factorize": cmd_factorize,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parses arguments, runs one subcommand, writes its report and returns the exit code."""
    try:
        args = parse_args(argv)
        config = _config_from_args(args)
        setup_logging(config.log_filepath, config.verbose)
        logger.info(f"Running {config.subcommand}")
        report = COMMANDS[config.subcommand](args, config)
        write_output(report.render(config.output_format), config.output_path)
    except (ValueError, KeyError, AttributeError, FileNotFoundError, IndexError, errors.PreconditionError,
            errors.UniverseCapExceeded, errors.TruncationError) as e:
        logger.error(f"Error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if not report.passed:
        for claim in report.failures():
            logger.warning(f"Check failed: {claim.claim}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def main_cli() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main_cli()
