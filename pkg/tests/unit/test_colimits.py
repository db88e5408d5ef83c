"""
Unit tests for the colimits module.
"""

import json
import math
import os

import pytest

from src.colimits import (
    TREND_COLLAPSE,
    TREND_CONSTANT,
    DirectedChain,
    chain_colimit_distance,
    chain_from_json,
    constant_chain,
    halving_chain,
    subspace_chain,
)
from src.errors import ChainValidationError


class TestDirectedChain:
    """Test chain validation."""

    def test_expanding_link_rejected(self, ab02, ab1):
        """Test that links must be nonexpanding."""
        with pytest.raises(ChainValidationError, match="expands"):
            DirectedChain((ab02, ab1), ({"a": "a", "b": "b"},))

    def test_missing_link_value(self, ab1):
        """Test that links must be total."""
        with pytest.raises(ChainValidationError, match="undefined on 'b'"):
            DirectedChain((ab1, ab1), ({"a": "a"},))

    def test_link_count(self, ab1):
        """Test that n stages need n - 1 links."""
        with pytest.raises(ChainValidationError, match="2 stages need 1 links"):
            DirectedChain((ab1, ab1), ())

    def test_composite_links(self, ab1, ab02):
        """Test that f_ij composes consecutive links."""
        swap = {"a": "b", "b": "a"}
        chain = DirectedChain((ab1, ab1, ab02), (swap, swap))
        assert chain.image(0, 2, "a") == "a"
        assert chain.image(0, 1, "a") == "b"
        assert chain.image(1, 1, "a") == "a"


class TestColimitDistance:
    """Test distances in colimits of chains."""

    def test_halving_chain_collapses(self):
        """Test that d(a, b) = 2^-n tends to 0."""
        chain = halving_chain(20)
        result = chain_colimit_distance(chain, 0, "a", "b")
        assert len(result.values) == 20
        assert result.values[0] == 0.5
        assert result.values[-1] == math.ldexp(1.0, -20)
        assert result.infimum == result.values[-1]
        assert result.trend == TREND_COLLAPSE
        assert result.collapses

    def test_values_nonincreasing(self):
        """Test that stage distances never increase along the chain."""
        values = chain_colimit_distance(halving_chain(8), 2, "a", "b").values
        assert all(x >= y for x, y in zip(values, values[1:]))

    def test_subspace_chain_recovers_space(self, pqr):
        """Test that the chain of prefixes has pqr's distances in its colimit."""
        chain = subspace_chain(pqr)
        result = chain_colimit_distance(chain, 1, "p", "q")
        assert result.infimum == 1.0
        assert result.trend == TREND_CONSTANT

    def test_constant_chain(self, ab1):
        """Test that a constant chain keeps the distance."""
        result = chain_colimit_distance(constant_chain(ab1, 3), 0, "a", "b")
        assert result.values == (1.0, 1.0, 1.0)
        assert not result.collapses

    def test_point_not_in_stage(self, pqr):
        """Test that both points must live in the starting stage."""
        with pytest.raises(ValueError, match="not in stage 0"):
            chain_colimit_distance(subspace_chain(pqr), 0, "p", "q")

    def test_stage_out_of_range(self):
        """Test the stage index bounds."""
        with pytest.raises(ValueError, match="out of range"):
            chain_colimit_distance(halving_chain(3), 3, "a", "b")


class TestChainFromJson:
    """Test the JSON chain formats."""

    def test_generator_with_override(self):
        """Test that an explicit stage count overrides the file's."""
        chain = chain_from_json({"generator": "halving", "stages": 20}, stages=5)
        assert len(chain) == 5

    def test_unknown_generator(self):
        """Test that unknown generators are rejected."""
        with pytest.raises(ChainValidationError, match="Unknown chain generator"):
            chain_from_json({"generator": "spiral"})

    def test_explicit_stages_default_to_identity_links(self):
        """Test explicit stage lists with implicit identity links."""
        data = {"stages": [
            {"points": ["a", "b"], "dist": [["a", "b", 2]]},
            {"points": ["a", "b"], "dist": [["a", "b", 1]]},
        ]}
        chain = chain_from_json(data)
        assert chain_colimit_distance(chain, 0, "a", "b").values == (2.0, 1.0)

    def test_empty_stages(self):
        """Test that a chain needs stages."""
        with pytest.raises(ChainValidationError, match="non-empty 'stages'"):
            chain_from_json({"stages": []})

    def test_constant_generator(self):
        """Test a constant chain over an inline space."""
        data = {"generator": "constant", "space": {"points": ["a", "b"], "dist": [["a", "b", 1]]}, "stages": 4}
        chain = chain_from_json(data)
        assert len(chain) == 4
        assert chain_colimit_distance(chain, 0, "a", "b").trend == TREND_CONSTANT

    def test_subspaces_generator_with_truncation(self):
        """Test prefix subspaces, cut to the requested number of stages."""
        space = {"points": ["p", "q", "r"], "dist": [["p", "q", 1], ["q", "r", 2], ["p", "r", 3]]}
        data = {"generator": "subspaces", "space": space}
        assert len(chain_from_json(data)) == 3
        chain = chain_from_json(data, stages=2)
        assert len(chain) == 2
        assert chain.stages[-1].points == ("p", "q")

    def test_space_file_next_to_chain_file(self, temp_dir):
        """Test that a space file named by the chain is found beside it."""
        with open(os.path.join(temp_dir, "space.json"), "w", encoding="utf-8") as f:
            json.dump({"points": ["a", "b"], "dist": [["a", "b", 0.5]]}, f)
        source = os.path.join(temp_dir, "chain.json")
        chain = chain_from_json({"generator": "constant", "space": "space.json", "stages": 2}, source=source)
        assert chain.stages[0].dist("a", "b") == 0.5

    def test_generator_needs_space(self):
        """Test that the constant and subspace generators name a space."""
        with pytest.raises(ChainValidationError, match="needs a 'space'"):
            chain_from_json({"generator": "subspaces"})

    def test_nonpositive_stage_count(self):
        """Test that at least one stage is requested."""
        with pytest.raises(ValueError, match="stages must be >= 1"):
            chain_from_json({"generator": "subspaces", "space": {"points": ["a"]}}, stages=0)
