"""Unit tests for DOT export."""

import re

from sig.services.dot import export_dot, render_dot
from sig.services.structure import generate_game_tree
from sig.services.update import generate_run

ACTION_EDGE = re.compile(r'^\s*"([^"]+)" -> "([^"]+)" \[label="([^"]+)"\];$', re.MULTILINE)
EPISTEMIC_EDGE = re.compile(r'^\s*"([^"]+)" -> "([^"]+)" \[dir=none, style=dashed, label="([^"]+)"\];$', re.MULTILINE)
NODE = re.compile(r'^\s*"([^"]+)" \[label="([^"]+)"\];$', re.MULTILINE)


class TestRunGraphs:
    """Tests for run-model graphs."""

    def test_fixture_a(self, fixture_a):
        """Test the 7 nodes and 6 action edges, with no epistemic edges."""
        _, model, observation = fixture_a
        text = render_dot(generate_run(model, observation, 2))
        assert text.startswith("digraph")
        assert len(NODE.findall(text)) == 7
        assert len(ACTION_EDGE.findall(text)) == 6
        assert EPISTEMIC_EDGE.findall(text) == []
        assert ("wa", "wa:t") in NODE.findall(text)
        assert "rank=same" in text

    def test_fixture_b_blurred_pair(self, fixture_b):
        """Test the dashed player-2 edge between wa and wb."""
        _, model, observation = fixture_b
        edges = EPISTEMIC_EDGE.findall(render_dot(generate_run(model, observation, 2)))
        assert ("wa", "wb", "2") in edges

    def test_shadowed_label(self, fixture_a_shadowed):
        """Test that a world named `wa` and the update of w by a stay two nodes."""
        _, model, observation = fixture_a_shadowed
        text = render_dot(generate_run(model, observation, 1))
        ids = [node for node, _ in NODE.findall(text)]
        assert len(ids) == len(set(ids)) == 6
        assert ("w.a", "w.a:t") in NODE.findall(text)
        assert ("w", "w.a", "a") in ACTION_EDGE.findall(text)
        assert ("wa", "wac", "c") in ACTION_EDGE.findall(text)

    def test_fixture_c_first_layer(self, fixture_c):
        """Test that layer 1 keeps the player-1 edge and drops player 2's."""
        _, model, observation = fixture_c
        edges = EPISTEMIC_EDGE.findall(render_dot(generate_run(model, observation, 1)))
        assert ("ua", "wa", "1") in edges or ("wa", "ua", "1") in edges
        layer_one = {"wa", "ua", "vb"}
        assert not [e for e in edges if e[2] == "2" and ({e[0], e[1]} & layer_one)]


class TestOtherGraphs:
    """Tests for trees and epistemic models."""

    def test_game_tree(self, fixture_a):
        """Test that tree nodes carry their game states."""
        game, _, _ = fixture_a
        text = render_dot(generate_game_tree(game, "s", 1))
        labels = [label for _, label in NODE.findall(text)]
        assert sorted(labels) == ["s:s", "sa:t", "sb:t'"]
        assert len(EPISTEMIC_EDGE.findall(text)) == 1

    def test_epistemic_model(self, fixture_c):
        """Test that initial models render without action edges."""
        _, model, _ = fixture_c
        text = render_dot(model)
        assert ACTION_EDGE.findall(text) == []
        assert len(EPISTEMIC_EDGE.findall(text)) == 2

    def test_export_writes_file(self, fixture_a, tmp_path):
        """Test that export writes the same text it returns."""
        _, model, observation = fixture_a
        target = tmp_path / "run.dot"
        text = export_dot(generate_run(model, observation, 1), target)
        assert target.read_text(encoding="utf-8") == text

    def test_depth_zero(self, fixture_a):
        """Test that a depth-0 run is a single node without edges."""
        _, model, observation = fixture_a
        text = render_dot(generate_run(model, observation, 0))
        assert NODE.findall(text) == [("w", "w:s")]
        assert ACTION_EDGE.findall(text) == []
        assert EPISTEMIC_EDGE.findall(text) == []
