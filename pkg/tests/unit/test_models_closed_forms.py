"""
Unit tests for the closed-form models.
"""

import pytest

from src.distances import INF
from src.errors import EvaluationError, PreconditionError, TermSyntaxError, TruncationError
from src.models.closed_forms import (
    ActionModel,
    ExceptionModel,
    HausdorffModel,
    SmallSpaceModel,
    WordMonoidModel,
    exception_monad,
)
from src.terms import Leaf, Node, Signature, parse_term
from src.varieties import FiniteQuantAlgebra


class TestWordMonoidModel:
    """Test words with the letterwise maximum metric."""

    @pytest.fixture
    def words(self, ab1):
        return WordMonoidModel(ab1, 3)

    def test_distance(self, words):
        """Test equal and unequal lengths."""
        assert words.distance(("a", "b"), ("b", "b")) == 1.0
        assert words.distance(("a", "b"), ("a", "b")) == 0.0
        assert words.distance(("a",), ("a", "a")) == INF
        assert words.distance((), ()) == 0.0

    def test_operations(self, words):
        """Test concatenation, the empty word and truncation."""
        assert words.operate("mul", (("a",), ("b", "a"))) == ("a", "b", "a")
        assert words.operate("e", ()) == ()
        with pytest.raises(TruncationError, match="exceeds max_len 3"):
            words.operate("mul", (("a", "a"), ("b", "b")))

    def test_quotient_of_terms(self, words):
        """Test that terms evaluate to their word of leaves."""
        assert words.parse_element("(mul (mul a (e)) b)") == ("a", "b")
        assert words.parse_element("[a,b]") == ("a", "b")
        assert words.format_element(("a", "b")) == "[a,b]"

    def test_parse_errors(self, words):
        """Test unknown letters and overlong words."""
        with pytest.raises(TermSyntaxError, match="Unknown point 'c'"):
            words.parse_element("[a,c]")
        with pytest.raises(TruncationError):
            words.parse_element("[a,a,a,a]")

    def test_representative_round_trip(self, words):
        """Test that the quotient of the representative is the word."""
        for w in words.all_words():
            assert words.quotient(words.representative(w)) == w
        assert len(words.all_words()) == 15

    def test_multiply(self, words):
        """Test flattening a word of words."""
        assert words.multiply((("a",), (), ("b", "a"))) == ("a", "b", "a")


class TestHausdorffModel:
    """Test finite subsets with the Hausdorff metric."""

    def test_distance(self, pqr):
        """Test the Hausdorff distance including the empty set."""
        model = HausdorffModel(pqr)
        assert model.distance(frozenset("p"), frozenset("qr")) == 3.0
        assert model.distance(frozenset("pq"), frozenset("q")) == 1.0
        assert model.distance(frozenset(), frozenset()) == 0.0
        assert model.distance(frozenset(), frozenset("p")) == INF

    def test_join_and_bottom(self, pqr):
        """Test union, the empty set and term quotients."""
        model = HausdorffModel(pqr)
        assert model.parse_element("(join p (join q p))") == frozenset("pq")
        assert model.parse_element("(bot)") == frozenset()
        assert model.parse_element("{r,p}") == frozenset("pr")
        assert model.format_element(frozenset("rp")) == "{p,r}"

    def test_all_subsets(self, pqr):
        """Test the eight subsets of a three-point space."""
        assert len(HausdorffModel(pqr).all_subsets()) == 8

    def test_multiply(self, pqr):
        """Test union of a set of sets."""
        model = HausdorffModel(pqr)
        assert model.multiply(frozenset({frozenset("p"), frozenset("qr")})) == frozenset("pqr")


class TestExceptionModel:
    """Test the base plus exceptions."""

    def test_distance_and_quotient(self, ab1, errs):
        """Test tagged summands."""
        model = ExceptionModel(ab1, errs)
        raised = model.quotient(Node("e1", ()))
        assert raised == (1, "e1")
        assert model.distance(raised, (1, "e2")) == 0.4
        assert model.distance((0, "a"), (0, "b")) == 1.0
        assert model.distance((0, "a"), raised) == INF

    def test_carrier_is_tagged_coproduct(self, ab1, errs):
        """Test that the elements and distances come from the coproduct of base and exceptions."""
        model = exception_monad(ab1, errs)
        assert model.carrier.points == ((0, "a"), (0, "b"), (1, "e1"), (1, "e2"))
        assert model.carrier.dist((0, "b"), (1, "e2")) == INF
        assert model.distance((1, "e2"), (1, "e1")) == model.carrier.dist((1, "e1"), (1, "e2"))

    def test_unknown_constant(self, ab1, errs):
        """Test that only declared exceptions can be raised."""
        with pytest.raises(EvaluationError, match="no constant 'e3'"):
            ExceptionModel(ab1, errs).operate("e3", ())

    def test_multiply(self, ab1, errs):
        """Test that raised exceptions propagate and values unwrap."""
        model = ExceptionModel(ab1, errs)
        assert model.multiply((0, (0, "a"))) == (0, "a")
        assert model.multiply((1, "e1")) == (1, "e1")


class TestSmallSpaceModel:
    """Test the spaces of bounded diameter."""

    def test_max_bound(self, ab02):
        """Test that distinct points are at max(d, eps)."""
        model = SmallSpaceModel(ab02, 0.5)
        assert model.distance("a", "b") == 0.5
        assert model.distance("a", "a") == 0.0

    def test_min_bound(self, ab1):
        """Test that distinct points are at min(d, eps)."""
        assert SmallSpaceModel(ab1, 0.5, "min").distance("a", "b") == 0.5
        assert SmallSpaceModel(ab1, 2.0, "min").distance("a", "b") == 1.0

    def test_invalid_bound(self, ab1):
        """Test that only max and min are accepted."""
        with pytest.raises(ValueError, match="bound must be"):
            SmallSpaceModel(ab1, 0.5, "mean")

    def test_no_operations(self, ab1):
        """Test that the signature is empty."""
        with pytest.raises(EvaluationError):
            SmallSpaceModel(ab1, 0.5).operate("f", ())


class TestActionModel:
    """Test the free monoid action."""

    def test_max_and_sum_metrics(self, monoid2, ab1):
        """Test both metrics on M x X."""
        max_model = ActionModel(monoid2, ab1)
        sum_model = ActionModel(monoid2, ab1, "sum")
        assert max_model.distance(("e", "a"), ("m", "b")) == 1.0
        assert sum_model.distance(("e", "a"), ("m", "b")) == pytest.approx(1.3)
        assert max_model.distance(("m", "a"), ("e", "a")) == 0.3
        assert sum_model.distance(("m", "a"), ("m", "b")) == 1.0

    def test_operate_and_quotient(self, monoid2, ab1):
        """Test that symbols act by left multiplication."""
        model = ActionModel(monoid2, ab1)
        assert model.unit("a") == ("e", "a")
        assert model.operate("m", [("e", "b")]) == ("m", "b")
        assert model.quotient(parse_term("(m (e (m a)))")) == ("m", "a")
        assert model.representative(("e", "a")) == Leaf("a")
        assert model.representative(("m", "a")) == Node("m", (Leaf("a"),))
        assert model.format_element(("m", "a")) == "(m,a)"

    def test_multiply(self, monoid2, ab1):
        """Test flattening nested pairs."""
        assert ActionModel(monoid2, ab1).multiply(("m", ("e", "a"))) == ("m", "a")

    def test_invalid_metric(self, monoid2, ab1):
        """Test that only max and sum are accepted."""
        with pytest.raises(ValueError, match="metric must be"):
            ActionModel(monoid2, ab1, "min")

    def test_rejects_non_monoid(self, ab1):
        """Test that the monoid laws are checked."""
        bad = FiniteQuantAlgebra.from_functions(
            ab1, Signature.of({"mul": 2, "e": 0}), {"mul": lambda x, y: y, "e": lambda: "a"}, "proj"
        )
        with pytest.raises(PreconditionError):
            ActionModel(bad, ab1)
