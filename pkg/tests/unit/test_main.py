"""
Unit tests for the command-line entry point.
"""

import json
import os
from pathlib import Path

import jsonschema
import pytest

from src.main import COMMANDS, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, UsageError, parse_args, run

SCHEMA_PATH = Path(__file__).resolve().parents[2] / "schemas" / "report.schema.json"


@pytest.fixture
def schema():
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


@pytest.fixture
def data(data_dir):
    """Path of a shipped input file by name."""
    return lambda name: str(data_dir / name)


def run_json(capsys, argv):
    """Runs the CLI and decodes the report it printed."""
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestParseArgs:
    """Test the argument parser."""

    def test_defaults(self):
        """Test the defaults of the counterexample subcommand."""
        args = parse_args(["counterexample", "--eps", "0.5"])
        assert args.eps == 0.5
        assert args.max_depth == 2
        assert args.eps_grid == (0.25, 0.5, 1.0)
        assert args.format == "json"

    def test_eps_grid_parsing(self):
        """Test comma-separated grids including infinity."""
        args = parse_args(["counterexample", "--eps", "0.5", "--eps-grid", "0.1, 1, inf"])
        assert args.eps_grid == (0.1, 1.0, float("inf"))

    def test_usage_error_instead_of_exit(self):
        """Test that parse errors raise rather than exit."""
        with pytest.raises(UsageError):
            parse_args(["meet", "--left", "x.json"])
        with pytest.raises(UsageError):
            parse_args(["unknown"])


class TestCounterexampleCommand:
    """Test the end-to-end reproduction."""

    def test_reproduces(self, capsys, schema):
        """Test that every claim passes and the report validates."""
        code, report = run_json(capsys, ["counterexample", "--eps", "0.5"])
        assert code == EXIT_OK
        assert report["status"] == "pass"
        jsonschema.validate(report, schema)

    @pytest.mark.parametrize("argv", [
        ["counterexample", "--eps", "1.5"],
        ["counterexample", "--eps", "0"],
        ["counterexample", "--eps", "0.5", "--max-depth", "1"],
    ])
    def test_out_of_range(self, capsys, argv):
        """Test that invalid parameters exit with the usage code."""
        assert run(argv) == EXIT_USAGE
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "Error:" in captured.err


class TestMeetCommand:
    """Test the meet subcommand on the shipped example."""

    def test_meet_example(self, capsys, schema, data):
        """Test that d(a, c) drops to 2 through b."""
        code, report = run_json(capsys, ["meet", "--left", data("meet_left.json"), "--right", data("meet_right.json")])
        assert code == EXIT_OK
        jsonschema.validate(report, schema)
        assert report["table"]["labels"] == ["a", "b", "c"]
        assert report["table"]["rows"][0] == [0.0, 1.0, 2.0]
        names = [c["claim"] for c in report["claims"]]
        assert "meet equals the brute-force chain infimum" in names

    def test_missing_file(self, capsys, data):
        """Test that a missing input exits with the usage code."""
        assert run(["meet", "--left", "nowhere.json", "--right", data("meet_right.json")]) == EXIT_USAGE
        assert "Input file not found" in capsys.readouterr().err

    def test_invalid_space(self, capsys, temp_dir, data):
        """Test that a table violating the triangle inequality is rejected."""
        bad = os.path.join(temp_dir, "bad.json")
        with open(bad, "w", encoding="utf-8") as f:
            json.dump({"points": ["a", "b", "c"], "dist": [["a", "b", 1], ["b", "c", 1], ["a", "c", 5]]}, f)
        assert run(["meet", "--left", bad, "--right", data("meet_right.json")]) == EXIT_USAGE


class TestColimitCommand:
    """Test the colimit subcommand."""

    def test_halving_collapses(self, capsys, schema, data):
        """Test that the halving chain reaches 2^-20 at the last stage."""
        code, report = run_json(capsys, ["colimit", "--chain", data("halving.json"), "--pair", "a,b"])
        assert code == EXIT_OK
        jsonschema.validate(report, schema)
        assert report["parameters"]["stages"] == 20
        assert len(report["table"]["pairs"]) == 20
        assert report["table"]["pairs"][0]["distance"] == 0.5

    def test_stage_override(self, capsys, data):
        """Test that --stages regenerates a shorter chain."""
        code, report = run_json(capsys, ["colimit", "--chain", data("halving.json"), "--pair", "a,b", "--stages", "3"])
        assert code == EXIT_OK
        assert report["table"]["pairs"][-1]["distance"] == 0.125

    def test_prefix_chain_from_shipped_file(self, capsys, data):
        """Test a generated chain whose space file sits next to the chain file."""
        code, report = run_json(capsys, ["colimit", "--chain", data("pqr_prefixes.json"), "--pair", "p,q", "--stage", "1"])
        assert code == EXIT_OK
        assert [row["distance"] for row in report["table"]["pairs"]] == [1.0, 1.0]
        assert report["claims"][1]["computed"] == "constant"

    def test_bad_pair(self, capsys, data):
        """Test that the pair needs exactly two points."""
        assert run(["colimit", "--chain", data("halving.json"), "--pair", "a"]) == EXIT_USAGE


class TestFreeCommand:
    """Test distances in free algebras."""

    def test_word_pairs(self, capsys, schema, data):
        """Test explicit pairs in the word monoid."""
        code, report = run_json(capsys, [
            "free", "--variety", "word", "--space", data("ab1.json"), "--pairs", "[a,b],[b,b];[a],[a,a]",
        ])
        assert code == EXIT_OK
        jsonschema.validate(report, schema)
        rows = report["table"]["pairs"]
        assert rows[0] == {"left": "[a,b]", "right": "[b,b]", "distance": 1.0}
        assert rows[1]["distance"] == "inf"

    @pytest.mark.parametrize("variety,space,pairs,expected", [
        ("monoid", "ab1.json", "(mul a (mul a b)),(mul a (mul b b))", 1.0),
        ("semilattice", "pqr.json", "{p},{q,r}", 3.0),
        ("small:0.5", "ab02.json", "a,b", 0.5),
    ])
    def test_closed_form_examples(self, capsys, data, variety, space, pairs, expected):
        """Test single distances in the word, Hausdorff and bounded-diameter models."""
        code, report = run_json(capsys, ["free", "--variety", variety, "--space", data(space), "--pairs", pairs])
        assert code == EXIT_OK
        assert report["table"]["pairs"][0]["distance"] == expected

    def test_full_table(self, capsys, schema, data):
        """Test the full table of the Hausdorff model at depth 1."""
        code, report = run_json(capsys, [
            "free", "--variety", "semilattice", "--space", data("pqr.json"), "--max-depth", "1",
        ])
        assert code == EXIT_OK
        jsonschema.validate(report, schema)
        assert len(report["table"]["labels"]) == len(report["table"]["rows"])

    def test_unknown_variety(self, capsys, data):
        """Test that an unknown variety name is a usage error."""
        assert run(["free", "--variety", "ring", "--space", data("ab1.json")]) == EXIT_USAGE
        assert "Unknown variety" in capsys.readouterr().err


class TestCheckCommand:
    """Test checking finite algebras against varieties."""

    def test_monoid_satisfies_monoid(self, capsys, schema, data):
        """Test the shipped two-element monoid."""
        code, report = run_json(capsys, ["check", "--algebra", data("monoid2.json"), "--variety", "monoid"])
        assert code == EXIT_OK
        jsonschema.validate(report, schema)
        assert report["claims"][0]["claim"] == "operations nonexpanding"

    def test_semilattice_file(self, capsys, data):
        """Test a variety given as a JSON file."""
        code = run(["check", "--algebra", data("semilattice2.json"), "--variety", data("semilattice.json")])
        assert code == EXIT_OK

    @pytest.mark.parametrize("ops", [
        [],
        {"mul": [["e", "z"], ["m", "m"]], "e": "e"},
    ])
    def test_malformed_algebra(self, capsys, temp_dir, ops):
        """Test that operation tables of the wrong type or naming unknown points exit with the usage code."""
        path = os.path.join(temp_dir, "algebra.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"carrier": {"points": ["e", "m"], "dist": [["e", "m", 0.3]]}, "ops": ops}, f)
        assert run(["check", "--algebra", path, "--variety", "monoid"]) == EXIT_USAGE
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "Error:" in captured.err

    @pytest.mark.parametrize("exc", [KeyError("Point 'z' is not in the space"), AttributeError("'list' object")])
    def test_lookup_errors_exit_with_usage_code(self, capsys, monkeypatch, data, exc):
        """Test that lookup and attribute errors from malformed input are reported, not raised."""
        def fail(args, config):
            raise exc

        monkeypatch.setitem(COMMANDS, "check", fail)
        assert run(["check", "--algebra", data("monoid2.json"), "--variety", "monoid"]) == EXIT_USAGE
        assert "Error:" in capsys.readouterr().err


class TestLawsCommand:
    """Test the law suite subcommand."""

    def test_word_laws_hold(self, capsys, data):
        """Test that the word monoid passes every law."""
        code, report = run_json(capsys, ["laws", "--monad", "word", "--space", data("ab1.json")])
        assert code == EXIT_OK
        assert report["command"] == "laws"

    def test_small_space_max_bound_fails(self, capsys, schema, data):
        """Test that failing laws give the check-failed code with witnesses."""
        code, report = run_json(capsys, [
            "laws", "--monad", "small:0.5", "--small-bound", "max", "--space", data("ab02.json"),
        ])
        assert code == EXIT_CHECK_FAILED
        jsonschema.validate(report, schema)
        assert report["status"] == "fail"


class TestFinitarityCommands:
    """Test the condition and factorization commands."""

    def test_condition_word(self, capsys, data):
        """Test the condition sweep for the word monoid."""
        code, report = run_json(capsys, ["condition", "--variety", "word", "--space", data("ab1.json")])
        assert code == EXIT_OK
        assert len(report["claims"]) == 3

    def test_factorize_meet_target(self, capsys, schema, data):
        """Test that the failing factorization is reported without failing the run."""
        code, report = run_json(capsys, [
            "factorize", "--variety", "two-eps-ops:0.5", "--space", data("ab1.json"), "--target", "meet",
        ])
        assert code == EXIT_OK
        jsonschema.validate(report, schema)
        verdict = report["claims"][0]
        assert verdict["computed"] == "fails"
        assert len(verdict["witness"]["pair"]) == 2
        assert report["claims"][1]["status"] == "pass"

    def test_factorize_two_ops_fails_by_default(self, capsys, schema, data):
        """Test that the comparison target reports the expected failure for two eps-close operations."""
        code, report = run_json(capsys, ["factorize", "--variety", "two-eps-ops:0.5", "--space", data("ab1.json")])
        assert code == EXIT_OK
        jsonschema.validate(report, schema)
        verdict = report["claims"][0]
        assert verdict["computed"] == "fails"
        assert verdict["expected"] == "fails"
        assert verdict["witness"]["d_target"] > verdict["witness"]["d_model"]

    def test_factorize_word_exists(self, capsys, data):
        """Test that the word monoid factors through the comparison target."""
        code, report = run_json(capsys, ["factorize", "--variety", "word", "--space", data("ab1.json")])
        assert code == EXIT_OK
        assert report["claims"][0]["computed"] == "exists"
        assert report["parameters"]["pairs_checked"] > 0

    @pytest.mark.parametrize("metric,code,computed", [
        ("sum", EXIT_OK, "exists"),
        ("max", EXIT_CHECK_FAILED, "fails"),
    ])
    def test_factorize_action_metrics(self, capsys, data, metric, code, computed):
        """Test that an unexpected verdict fails the run."""
        argv = ["factorize", "--variety", f"action:{data('monoid2.json')}", "--space", data("ab1.json"),
                "--action-metric", metric]
        result, report = run_json(capsys, argv)
        assert result == code
        assert report["claims"][0]["computed"] == computed
        assert report["claims"][0]["expected"] == "exists"

    def test_meet_target_needs_two_ops(self, capsys, data):
        """Test that the meet target is refused for other varieties."""
        argv = ["factorize", "--variety", "word", "--space", data("ab1.json"), "--target", "meet"]
        assert run(argv) == EXIT_USAGE


class TestOutputOptions:
    """Test output formats and files."""

    def test_csv_to_file(self, capsys, temp_dir):
        """Test writing a CSV report to a file."""
        out = os.path.join(temp_dir, "reports", "ce.csv")
        assert run(["counterexample", "--eps", "0.25", "--format", "csv", "--output", out]) == EXIT_OK
        assert capsys.readouterr().out == ""
        with open(out, encoding="utf-8") as f:
            header = f.readline().strip()
        assert header.startswith("claim")

    def test_log_file(self, capsys, temp_dir):
        """Test that --log-dir creates the run log."""
        log_dir = os.path.join(temp_dir, "logs")
        assert run(["counterexample", "--eps", "0.5", "--log-dir", log_dir]) == EXIT_OK
        assert os.path.exists(os.path.join(log_dir, "qalg.log"))
