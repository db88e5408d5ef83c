"""
Directed chains of finite metric spaces and distances in their colimits.

An infinite chain is only ever handled through an explicit truncation; the computed value
for a truncated chain is an upper bound on the colimit distance, reported with its trend.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .distances import format_dist
from .errors import ChainValidationError
from .metric_log import log_metric
from .spaces import FinMetricSpace, is_nonexpanding
from .utils import load_json_file, resolve_relative

# Configure logging for this module
logger = logging.getLogger(__name__)

# A truncated chain whose last stage value is at most this is reported as collapsing.
COLLAPSE_THRESHOLD = 1e-6

TREND_COLLAPSE = "→ 0"
TREND_CONSTANT = "constant"
TREND_DECREASING = "decreasing"

GENERATORS = ("halving", "constant", "subspaces")

# Stage count of generated chains when the file gives none.
DEFAULT_GENERATED_STAGES = 20


@dataclass(frozen=True)
class DirectedChain:
    """
    Stages D_0, D_1, ... with links D_i -> D_{i+1}.

    Longer links f_ij are the composites of consecutive ones, so the identity and
    composition laws hold by construction.
    """

    stages: Tuple[FinMetricSpace, ...]
    links: Tuple[Dict[Hashable, Hashable], ...]

    def __post_init__(self):
        if len(self.stages) == 0:
            raise ChainValidationError("A chain needs at least one stage")
        if len(self.links) != len(self.stages) - 1:
            raise ChainValidationError(
                f"{len(self.stages)} stages need {len(self.stages) - 1} links, got {len(self.links)}"
            )
        for k, link in enumerate(self.links):
            source, target = self.stages[k], self.stages[k + 1]
            missing = [p for p in source.points if p not in link]
            if missing:
                raise ChainValidationError(f"Link {k}->{k + 1} is undefined on {missing[0]!r}")
            stray = [link[p] for p in source.points if link[p] not in target]
            if stray:
                raise ChainValidationError(
                    f"Link {k}->{k + 1} maps into unknown point {stray[0]!r}"
                )
            witness = is_nonexpanding(link, source, target)
            if witness is not None:
                raise ChainValidationError(
                    f"Link {k}->{k + 1} expands ({witness.p!r}, {witness.q!r}): "
                    f"{format_dist(witness.source_distance)} -> {format_dist(witness.target_distance)}"
                )

    def __len__(self) -> int:
        return len(self.stages)

    def image(self, i: int, j: int, y: Hashable) -> Hashable:
        """f_ij(y) for i <= j."""
        for k in range(i, j):
            y = self.links[k][y]
        return y


@dataclass(frozen=True)
class ColimitDistance:
    start: int
    values: Tuple[float, ...]
    infimum: float
    trend: str

    @property
    def collapses(self) -> bool:
        return self.trend == TREND_COLLAPSE


def _trend(values: Sequence[float]) -> str:
    if values[-1] <= COLLAPSE_THRESHOLD and values[0] > values[-1]:
        return TREND_COLLAPSE
    if values[0] == values[-1]:
        return TREND_CONSTANT
    return TREND_DECREASING


def chain_colimit_distance(
    chain: DirectedChain, i: int, y: Hashable, y_other: Hashable
) -> ColimitDistance:
    """
    Distances d_j(f_ij y, f_ij y') for j = i..last, and their infimum.

    Args:
        chain: The (possibly truncated) chain.
        i: Stage the two points live in.
        y: First point of stage i.
        y_other: Second point of stage i.

    Returns:
        The nonincreasing per-stage values, their minimum and a trend label.

    Raises:
        ValueError: If the stage index is out of range or a point is not in stage i.
    """
    if not 0 <= i < len(chain):
        raise ValueError(f"Stage index {i} out of range 0..{len(chain) - 1}")
    stage = chain.stages[i]
    for p in (y, y_other):
        if p not in stage:
            raise ValueError(f"Point {p!r} is not in stage {i}")

    values: List[float] = []
    a, b = y, y_other
    for j in range(i, len(chain)):
        if j > i:
            a, b = chain.links[j - 1][a], chain.links[j - 1][b]
        d = chain.stages[j].dist(a, b)
        values.append(d)
        log_metric(j, "colimit_distance", d)

    result = ColimitDistance(start=i, values=tuple(values), infimum=min(values), trend=_trend(values))
    logger.info(
        f"Colimit distance of ({y!r}, {y_other!r}) from stage {i}: "
        f"{format_dist(result.infimum)} over {len(values)} stages, trend {result.trend}"
    )
    return result


def _identity(points: Sequence[Hashable]) -> Dict[Hashable, Hashable]:
    return {p: p for p in points}


def halving_chain(stages: int) -> DirectedChain:
    """M_n = {a, b} with d(a, b) = 2^-n for n = 1..stages, identity links."""
    if stages < 1:
        raise ValueError(f"stages must be >= 1, got {stages}")
    spaces = []
    for n in range(1, stages + 1):
        d = math.ldexp(1.0, -n)
        spaces.append(FinMetricSpace(("a", "b"), np.array([[0.0, d], [d, 0.0]])))
    links = tuple(_identity(("a", "b")) for _ in range(stages - 1))
    return DirectedChain(tuple(spaces), links)


def subspace_chain(x: FinMetricSpace) -> DirectedChain:
    """The chain of prefix subspaces of x with inclusion links; its colimit is x itself."""
    if len(x) == 0:
        return DirectedChain((x,), ())
    stages = tuple(x.restrict(x.points[:k]) for k in range(1, len(x) + 1))
    links = tuple(_identity(s.points) for s in stages[:-1])
    return DirectedChain(stages, links)


def constant_chain(x: FinMetricSpace, stages: int) -> DirectedChain:
    return DirectedChain(tuple(x for _ in range(stages)), tuple(_identity(x.points) for _ in range(stages - 1)))


def _generator_space(data: Mapping[str, Any], source: Optional[str]) -> FinMetricSpace:
    raw = data.get("space")
    if raw is None:
        raise ChainValidationError(f"Chain generator {data.get('generator')!r} needs a 'space'")
    if isinstance(raw, str):
        raw = load_json_file(resolve_relative(raw, source))
    return FinMetricSpace.from_json(raw)


def _truncate(chain: DirectedChain, stages: Optional[int]) -> DirectedChain:
    if stages is None:
        return chain
    if stages < 1:
        raise ValueError(f"stages must be >= 1, got {stages}")
    return DirectedChain(chain.stages[:stages], chain.links[:stages - 1])


def chain_from_json(
    data: Mapping[str, Any], stages: Optional[int] = None, source: Optional[str] = None
) -> DirectedChain:
    """
    Builds a chain from JSON.

    Accepted forms:
        {"generator": "halving", "stages": N}
        {"generator": "constant", "space": <space or file>, "stages": N}
        {"generator": "subspaces", "space": <space or file>}
        {"stages": [<space>, ...], "links": [{"p": "q", ...}, ...]}

    Missing links default to the identity on point names. An explicit `stages` argument
    overrides a generator's count and truncates the other forms. Space files are looked up
    next to the chain file `source` when not found as given.

    Raises:
        ChainValidationError: On an unknown generator or an invalid chain.
    """
    generator = data.get("generator")
    if generator is not None:
        if generator not in GENERATORS:
            raise ChainValidationError(f"Unknown chain generator: {generator!r}")
        if generator == "subspaces":
            return _truncate(subspace_chain(_generator_space(data, source)), stages)
        count = stages if stages is not None else int(data.get("stages", DEFAULT_GENERATED_STAGES))
        if generator == "halving":
            return halving_chain(count)
        if count < 1:
            raise ValueError(f"stages must be >= 1, got {count}")
        return constant_chain(_generator_space(data, source), count)

    raw_stages = data.get("stages")
    if not isinstance(raw_stages, list) or not raw_stages:
        raise ChainValidationError("Chain JSON needs a non-empty 'stages' list or a 'generator'")
    spaces = tuple(FinMetricSpace.from_json(s) for s in raw_stages)
    if stages is not None:
        spaces = spaces[:stages]
    raw_links = data.get("links")
    links = []
    for k in range(len(spaces) - 1):
        if raw_links is not None and k < len(raw_links):
            links.append({str(p): str(q) for p, q in raw_links[k].items()})
        else:
            links.append(_identity(spaces[k].points))
    return DirectedChain(spaces, tuple(links))
