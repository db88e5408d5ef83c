"""
Unit tests for the reports module.
"""

import json
from pathlib import Path

import jsonschema
import pytest

from src.distances import INF
from src.reports import FAIL, PASS, Claim, DistanceTable, OutputFormat, Report, to_json_value
from src.terms import parse_term

SCHEMA_PATH = Path(__file__).resolve().parents[2] / "schemas" / "report.schema.json"


@pytest.fixture
def schema():
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


@pytest.fixture
def report():
    r = Report("meet", {"eps": 0.5, "space": "ab"})
    r.add(Claim.distance("d(a, c)", 2.0, 2.0))
    r.add(Claim.check("meet is a pseudometric", True, True, True))
    return r


class TestToJsonValue:
    """Test the JSON conversion of report values."""

    def test_infinity(self):
        """Test that infinite distances become 'inf'."""
        assert to_json_value(INF) == "inf"
        assert to_json_value([1.0, INF]) == [1.0, "inf"]

    def test_terms_and_sets(self):
        """Test terms, frozensets and tuples."""
        assert to_json_value(parse_term("(sigma1 a b)")) == "(sigma1 a b)"
        assert to_json_value(frozenset({"q", "p"})) == ["p", "q"]
        assert to_json_value(("a", "b")) == ["a", "b"]

    def test_bool_stays_bool(self):
        """Test that booleans are not turned into numbers."""
        assert to_json_value(True) is True


class TestClaim:
    """Test claims."""

    def test_distance_with_tolerance(self):
        """Test that distance claims compare within the tolerance."""
        assert Claim.distance("x", 0.1 + 0.2, 0.3).passed

    def test_exact_distance(self):
        """Test that tol = 0 demands exact equality."""
        assert not Claim.distance("x", 0.1 + 0.2, 0.3, tol=0).passed
        assert Claim.distance("x", 1.0, 1.0, tol=0).status == PASS

    def test_to_json(self):
        """Test the serialized claim fields."""
        claim = Claim.check("d", INF, 1.0, False, ["a", "b"])
        assert claim.to_json() == {
            "claim": "d", "computed": "inf", "expected": 1.0, "status": FAIL, "witness": ["a", "b"],
        }


class TestReport:
    """Test reports and their renderings."""

    def test_status(self, report):
        """Test the aggregated status and failures."""
        assert report.passed
        report.add(Claim.check("broken", 1, 0, False))
        assert report.status == FAIL
        assert [c.claim for c in report.failures()] == ["broken"]

    def test_claim_lookup(self, report):
        """Test finding claims by name."""
        assert report.claim("d(a, c)").computed == 2.0
        with pytest.raises(KeyError, match="No claim named"):
            report.claim("missing")

    def test_json_matches_schema(self, report, schema):
        """Test that JSON output validates against the report schema."""
        report.table = DistanceTable(pairs=[("a", "b", 1.0), ("a", "c", INF)])
        data = json.loads(report.render(OutputFormat.json))
        jsonschema.validate(data, schema)
        assert data["table"]["pairs"][1]["distance"] == "inf"

    def test_matrix_table_matches_schema(self, schema):
        """Test the full-matrix table form."""
        r = Report("free", table=DistanceTable(labels=["a", "b"], matrix=[[0.0, INF], [INF, 0.0]]))
        jsonschema.validate(r.to_json(), schema)

    def test_schema_rejects_negative_distance(self, schema):
        """Test that the schema catches malformed tables."""
        r = Report("free", table=DistanceTable(pairs=[("a", "b", -1.0)]))
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(r.to_json(), schema)

    def test_render_csv(self, report):
        """Test the CSV rendering of claims."""
        lines = report.render(OutputFormat.csv).splitlines()
        assert lines[0] == "claim,computed,expected,status,witness"
        assert lines[1] == "\"d(a, c)\",2.0,2.0,pass,null"

    def test_render_csv_table(self):
        """Test the CSV rendering of a matrix table."""
        r = Report("free", table=DistanceTable(labels=["a", "b"], matrix=[[0.0, 1.0], [1.0, 0.0]]))
        assert r.render(OutputFormat.csv).splitlines() == [",a,b", "a,0.0,1.0", "b,1.0,0.0"]

    def test_render_text(self, report):
        """Test the text rendering."""
        text = report.render(OutputFormat.text)
        assert text.splitlines()[0] == "meet: PASS"
        assert "[pass] d(a, c): computed 2.0, expected 2.0" in text
        assert "  eps = 0.5" in text
