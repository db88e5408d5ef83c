"""
Machine-readable reports: claims with computed and expected values, and distance tables.

Every claim serializes as {"claim", "computed", "expected", "status", "witness"}; reports
render deterministically as JSON, CSV or text.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .distances import TOLERANCE, close, dist_to_json, format_dist
from .terms import Leaf, Node, format_term

PASS = "pass"
FAIL = "fail"


class OutputFormat(Enum):
    """Supported report renderings."""
    json = "json"
    csv = "csv"
    text = "text"


def to_json_value(value: Any) -> Any:
    """Converts distances, terms and model elements into JSON-safe values."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return dist_to_json(value)
    if isinstance(value, (Leaf, Node)):
        return format_term(value)
    if isinstance(value, frozenset):
        return sorted(str(to_json_value(v)) for v in value)
    if isinstance(value, dict):
        return {str(k): to_json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_value(v) for v in value]
    if hasattr(value, "item"):
        return to_json_value(value.item())
    return str(value)


def _text(value: Any) -> str:
    value = to_json_value(value)
    if isinstance(value, str):
        return value
    return json.dumps(value, ensure_ascii=False)


@dataclass
class Claim:
    claim: str
    computed: Any
    expected: Any
    status: str
    witness: Any = None

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @classmethod
    def check(cls, claim: str, computed: Any, expected: Any, ok: bool, witness: Any = None) -> "Claim":
        return cls(claim, computed, expected, PASS if ok else FAIL, witness)

    @classmethod
    def distance(
        cls, claim: str, computed: float, expected: float, tol: float = TOLERANCE, witness: Any = None
    ) -> "Claim":
        """A distance claim; tol = 0 asks for exact equality."""
        ok = computed == expected if tol == 0 else close(computed, expected, tol)
        return cls.check(claim, computed, expected, ok, witness)

    def to_json(self) -> Dict[str, Any]:
        return {
            "claim": self.claim,
            "computed": to_json_value(self.computed),
            "expected": to_json_value(self.expected),
            "status": self.status,
            "witness": to_json_value(self.witness),
        }


@dataclass
class DistanceTable:
    """Either a full labelled matrix or a list of (left, right, distance) rows."""

    labels: List[str] = field(default_factory=list)
    matrix: List[List[float]] = field(default_factory=list)
    pairs: List[Tuple[str, str, float]] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        if self.pairs:
            return {"pairs": [{"left": l, "right": r, "distance": dist_to_json(d)} for l, r, d in self.pairs]}
        return {"labels": list(self.labels), "rows": [[dist_to_json(d) for d in row] for row in self.matrix]}

    def csv_rows(self) -> List[List[str]]:
        if self.pairs:
            return [["left", "right", "distance"]] + [[l, r, format_dist(d)] for l, r, d in self.pairs]
        rows = [[""] + list(self.labels)]
        for label, row in zip(self.labels, self.matrix):
            rows.append([label] + [format_dist(d) for d in row])
        return rows


@dataclass
class Report:
    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    claims: List[Claim] = field(default_factory=list)
    table: Optional[DistanceTable] = None

    def add(self, claim: Claim) -> Claim:
        self.claims.append(claim)
        return claim

    def extend(self, claims: Sequence[Claim]) -> None:
        self.claims.extend(claims)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    @property
    def status(self) -> str:
        return PASS if self.passed else FAIL

    def failures(self) -> List[Claim]:
        return [c for c in self.claims if not c.passed]

    def claim(self, name: str) -> Claim:
        for c in self.claims:
            if c.claim == name:
                return c
        raise KeyError(f"No claim named {name!r}")

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "command": self.command,
            "parameters": to_json_value(self.parameters),
            "status": self.status,
            "claims": [c.to_json() for c in self.claims],
        }
        if self.table is not None:
            data["table"] = self.table.to_json()
        return data

    def render(self, output_format: OutputFormat) -> str:
        if output_format == OutputFormat.json:
            return json.dumps(self.to_json(), indent=2, ensure_ascii=False)
        if output_format == OutputFormat.csv:
            return self._render_csv()
        return self._render_text()

    def _render_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if self.table is not None:
            writer.writerows(self.table.csv_rows())
            if self.claims:
                writer.writerow([])
        if self.claims or self.table is None:
            writer.writerow(["claim", "computed", "expected", "status", "witness"])
            for c in self.claims:
                writer.writerow([c.claim, _text(c.computed), _text(c.expected), c.status, _text(c.witness)])
        return buffer.getvalue()

    def _render_text(self) -> str:
        lines = [f"{self.command}: {self.status.upper()}"]
        for key, value in self.parameters.items():
            lines.append(f"  {key} = {_text(value)}")
        for c in self.claims:
            line = f"[{c.status}] {c.claim}: computed {_text(c.computed)}, expected {_text(c.expected)}"
            if c.witness is not None:
                line += f" (witness {_text(c.witness)})"
            lines.append(line)
        if self.table is not None:
            for row in self.table.csv_rows():
                lines.append("  ".join(row))
        return "\n".join(lines)
