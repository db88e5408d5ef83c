"""
Unit tests for the closure module.
"""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.closure import (
    chain_infimum,
    meet,
    metric_reflection,
    min_plus_chain_costs,
    shortest_path_closure,
    zero_classes,
)
from src.distances import INF, close
from src.spaces import FinMetricSpace, FinPseudoSpace, validate_pseudometric


@st.composite
def pseudometric_pairs(draw, max_points=4):
    """Two random pseudometrics on the same points."""
    n = draw(st.integers(min_value=1, max_value=max_points))
    weight = st.one_of(st.floats(min_value=0.0, max_value=5.0), st.just(INF))
    tables = []
    for _ in range(2):
        w = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                w[i, j] = w[j, i] = draw(weight)
        tables.append(shortest_path_closure(w))
    points = tuple(f"x{i}" for i in range(n))
    return FinPseudoSpace(points, tables[0], validate=False), FinPseudoSpace(points, tables[1], validate=False)


class TestShortestPathClosure:
    """Test the Floyd-Warshall closure."""

    def test_closes_a_path(self):
        """Test that a long edge is replaced by the shorter detour."""
        w = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
        closed = shortest_path_closure(w)
        assert closed[0, 2] == 2.0
        assert w[0, 2] == 5.0

    def test_disconnected_stays_infinite(self):
        """Test that missing edges remain at infinity."""
        w = np.array([[0, INF], [INF, 0]])
        assert shortest_path_closure(w)[0, 1] == INF

    def test_empty_table(self):
        """Test the closure of an empty table."""
        assert shortest_path_closure(np.zeros((0, 0))).shape == (0, 0)


class TestMeet:
    """Test the meet of pseudometrics."""

    def test_meet_of_shipped_example(self, data_dir):
        """Test that the meet closes the pointwise minimum through b."""
        left = FinMetricSpace.from_json(json.loads((data_dir / "meet_left.json").read_text()))
        right = FinMetricSpace.from_json(json.loads((data_dir / "meet_right.json").read_text()))
        result = meet(left, right)
        assert result.dist("a", "b") == 1.0
        assert result.dist("b", "c") == 1.0
        assert result.dist("a", "c") == 2.0

    def test_meet_aligns_point_order(self, ab1):
        """Test that the second argument may list its points in another order."""
        other = FinMetricSpace(("b", "a"), np.array([[0.0, 0.5], [0.5, 0.0]]))
        assert meet(ab1, other).dist("a", "b") == 0.5

    def test_meet_rejects_different_points(self, ab1, pqr):
        """Test that point sets must agree."""
        with pytest.raises(ValueError, match="different point sets"):
            meet(ab1, pqr)

    @given(pseudometric_pairs())
    @settings(max_examples=50, deadline=None)
    def test_meet_matches_chain_infimum(self, pair):
        """Test the meet against brute-force chains over the pointwise minimum."""
        d1, d2 = pair
        result = meet(d1, d2)
        validate_pseudometric(result)

        def d0(p, q):
            return min(d1.dist(p, q), d2.dist(p, q))

        for p in d1.points:
            for q in d1.points:
                assert result.dist(p, q) <= d0(p, q)
                assert close(result.dist(p, q), chain_infimum(d0, d1.points, p, q))


class TestChains:
    """Test chain infima and exact-length chain costs."""

    def test_chain_infimum_respects_max_len(self):
        """Test that bounding the chain length can only raise the infimum."""
        w = {("a", "b"): 1.0, ("b", "c"): 1.0, ("a", "c"): 5.0}

        def d0(p, q):
            return 0.0 if p == q else w.get((p, q), w.get((q, p)))

        assert chain_infimum(d0, "abc", "a", "c") == 2.0
        assert chain_infimum(d0, "abc", "a", "c", max_len=1) == 5.0
        assert chain_infimum(d0, "abc", "a", "a") == 0.0

    def test_min_plus_chain_costs(self):
        """Test minimal costs of chains with exactly n steps."""
        w = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
        assert min_plus_chain_costs(w, 0, 2, 3) == [5.0, 2.0, 7.0]

    def test_min_plus_chain_costs_below(self):
        """Test that heavy edges can be excluded."""
        w = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
        assert min_plus_chain_costs(w, 0, 2, 3, below=2.0) == [INF, 2.0, INF]


class TestMetricReflection:
    """Test the metric quotient of a pseudometric."""

    def test_identifies_zero_distance_points(self):
        """Test that points at distance 0 collapse onto the first member."""
        matrix = np.array([[0, 0, 1], [0, 0, 1], [1, 1, 0]], dtype=float)
        space = FinPseudoSpace(("a", "b", "c"), matrix)
        assert zero_classes(space) == [[0, 1], [2]]

        reflection = metric_reflection(space)
        assert reflection.space.points == ("a", "c")
        assert reflection.quotient == {"a": "a", "b": "a", "c": "c"}
        assert reflection.class_of("b") == ("a", "b")
        assert reflection.space.dist("a", "c") == 1.0
        assert reflection.space.is_metric()

    def test_metric_space_is_unchanged(self, pqr):
        """Test that reflecting a metric space changes nothing."""
        reflection = metric_reflection(pqr)
        assert reflection.space.points == pqr.points
        assert np.array_equal(reflection.space.matrix, pqr.matrix)
