"""Unit tests for the update product and run models."""

import pytest
from hypothesis import given, settings, strategies as st

from sig.errors import SignatureMismatchError, UsageError
from sig.services.corpus import random_instance
from sig.services.game import build_epistemic, identity_observation, make_signature
from sig.services.normality import check_normality
from sig.services.update import (
    ETLModel,
    close_frontier,
    generate_run,
    product,
    run_assign,
    run_layers,
)
from sig.services.worlds import RunWorld, extend, node_label


def _labels(worlds) -> set[str]:
    return {node_label(w) for w in worlds}


def _layer_mismatches(run, relations=None) -> list[str]:
    """Rebuild every layer from the one before and list where `relations` differ from it.

    Layer k+1 must hold exactly the w·a for w in layer k and a enabled at
    w's state, and w·a ~i u·b exactly when w ~i u, a and b are blurred for i
    and i is told the same after both moves.
    """
    relations = relations if relations is not None else run
    game, observation = run.game, run.observation
    layers = run_layers(run)
    problems = []
    for k, layer in enumerate(layers):
        if k == run.depth:
            continue
        children = {extend(w, a): (w, a) for w in layer for a in game.enabled_at(run.assign[w])}
        below = set(layers[k + 1]) if k + 1 < len(layers) else set()
        if set(children) != below:
            problems.append(f"layer {k + 1}: {len(below)} worlds, expected {len(children)}")
            continue
        for player in run.signature.players:
            for x, (w, a) in children.items():
                after_a = game.observed(run.assign[x], player)
                for y, (u, b) in children.items():
                    expected = (
                        u in run.alternatives(player, w)
                        and observation.blurred(player, a, b)
                        and after_a == game.observed(run.assign[y], player)
                    )
                    if expected != (y in relations.alternatives(player, x)):
                        problems.append(f"{player}: {run.label(x)} {run.label(y)}")
    return problems


def _epistemic_pairs(run, layer: int | None = None) -> set[tuple[str, str, str]]:
    pairs = set()
    for player in run.signature.players:
        for w in run.worlds:
            if layer is not None and run.layer[w] != layer:
                continue
            for v in run.alternatives(player, w):
                if v != w:
                    left, right = sorted((node_label(w), node_label(v)))
                    pairs.add((player, left, right))
    return pairs


class TestProduct:
    """Tests for M ⊗ U."""

    def test_blurred_product_fixture_b(self, fixture_b):
        """Test that (w,a) and (w,b) are related for player 2 only."""
        _, model, observation = fixture_b
        updated = product(model, observation)
        wa, wb = RunWorld("w", ("a",)), RunWorld("w", ("b",))
        assert set(updated.worlds) == {wa, wb}
        assert updated.related("2", wa, wb)
        assert not updated.related("1", wa, wb)
        assert updated.assign[wa] == "t"

    def test_public_product_fixture_c(self, fixture_c):
        """Test that only (w,a) ~1 (u,a) survives the public update."""
        _, model, observation = fixture_c
        updated = product(model, observation)
        assert _labels(updated.worlds) == {"wa", "ua", "vb"}
        wa, ua, vb = RunWorld("w", ("a",)), RunWorld("u", ("a",)), RunWorld("v", ("b",))
        assert updated.alternatives("1", wa) == {wa, ua}
        assert updated.alternatives("2", ua) == {ua}
        assert updated.alternatives("2", vb) == {vb}

    def test_empty_product(self, fixture_a):
        """Test that a model with no enabled action updates to an empty model."""
        game, _, observation = fixture_a
        leaf = build_epistemic(game, {"w": "o1"}, {}, name="leaf")
        updated = product(leaf, observation)
        assert updated.is_empty
        assert updated.worlds == ()

    def test_signature_mismatch(self, fixture_a):
        """Test that the observation model must share the game's signature."""
        _, model, _ = fixture_a
        other = identity_observation(make_signature(["1"], {"1": ["a"]}, []))
        with pytest.raises(SignatureMismatchError):
            product(model, other)


class TestRunModel:
    """Tests for the depth-bounded run model."""

    def test_fixture_a_run(self, fixture_a):
        """Test 7 worlds in layers 1/2/4, 6 action edges and no epistemic edges."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 2)
        assert [len(layer) for layer in run_layers(run)] == [1, 2, 4]
        assert run.edge_count() == (6, 0)
        assert _labels(run.frontier) == {"wac", "wad", "wbc", "wbd"}

    def test_fixture_b_run(self, fixture_b):
        """Test that wa ~2 wb is the only non-reflexive epistemic edge."""
        _, model, observation = fixture_b
        run = generate_run(model, observation, 2)
        assert len(run.worlds) == 7
        assert _epistemic_pairs(run) == {("2", "wa", "wb")}

    def test_fixture_b_depth_three(self, fixture_b):
        """Test that wac (at t) and wbd (at t') each enable two actions."""
        _, model, observation = fixture_b
        run = generate_run(model, observation, 3)
        wac = run.world("wac")
        wbd = run.world("wbd")
        assert run.assign[wac] == "t"
        assert run.assign[wbd] == "t'"
        assert run.act(wac) == {"c", "d"}
        assert run.act(wbd) == {"c", "d"}

    def test_fixture_c_run(self, fixture_c):
        """Test the layer-1 worlds and the single layer-1 edge wa ~1 ua."""
        _, model, observation = fixture_c
        run = generate_run(model, observation, 1)
        assert _labels(run_layers(run)[1]) == {"wa", "ua", "vb"}
        assert _epistemic_pairs(run, layer=1) == {("1", "ua", "wa")}

    def test_run_assign(self, fixture_b, fixture_c):
        """Test that executing a history reaches the assigned state."""
        _, model_b, obs_b = fixture_b
        run_b = generate_run(model_b, obs_b, 2)
        assert run_assign(run_b, run_b.world("wac")) == "t"
        assert run_assign(run_b, run_b.world("w")) == "s"
        _, model_c, obs_c = fixture_c
        run_c = generate_run(model_c, obs_c, 1)
        assert run_assign(run_c, run_c.world("vb")) == "t'"
        for world in run_b.worlds:
            assert run_assign(run_b, world) == run_b.assign[world]

    def test_depth_zero(self, fixture_a):
        """Test that depth 0 gives the initial model as one frontier layer."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 0)
        assert _labels(run.worlds) == {"w"}
        assert run.frontier == frozenset(run.worlds)
        assert run.edge_count() == (0, 0)

    def test_negative_depth(self, fixture_a):
        """Test that a negative depth is refused."""
        _, model, observation = fixture_a
        with pytest.raises(UsageError):
            generate_run(model, observation, -1)

    def test_run_stops_at_leaves(self, fixture_a):
        """Test that runs deeper than the game stay finite."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 5)
        assert len(run.worlds) == 7
        assert run.frontier == frozenset()

    def test_layers_are_epistemic_models(self, fixture_c):
        """Test that every stage of the run is a valid epistemic model."""
        _, model, observation = fixture_c
        run = generate_run(model, observation, 2)
        assert len(run.stages) == 3
        for stage in run.stages[1:]:
            for player in stage.signature.players:
                for world in stage.worlds:
                    for other in stage.alternatives(player, world):
                        assert stage.valuation(world, player) == stage.valuation(other, player)

    def test_product_run_is_generated_submodel(self, fixture_c):
        """Test that the run of M ⊗ U matches layers 1..k of the run of M."""
        _, model, observation = fixture_c
        full = generate_run(model, observation, 2)
        shifted = generate_run(product(model, observation), observation, 1)
        below = [w for w in full.worlds if full.layer[w] >= 1]
        assert _labels(shifted.worlds) == _labels(below)
        for world in shifted.worlds:
            twin = full.world(node_label(world))
            assert shifted.assign[world] == full.assign[twin]
            for player in shifted.signature.players:
                assert _labels(shifted.alternatives(player, world)) == _labels(
                    full.alternatives(player, twin)
                )


class TestLayerReconstruction:
    """Tests that each layer matches its brute-force rebuild from the layer before."""

    @pytest.mark.parametrize("name", ["fixture_a", "fixture_a_blurred", "fixture_b", "fixture_c"])
    def test_worked_examples(self, name, request):
        """Test the layer sizes and every epistemic pair of the worked examples."""
        _, model, observation = request.getfixturevalue(name)
        run = generate_run(model, observation, 3)
        layers = run_layers(run)
        for k in range(len(layers) - 1):
            assert len(layers[k + 1]) == sum(len(run.game.enabled_at(run.assign[w])) for w in layers[k])
        assert _layer_mismatches(run) == []

    @pytest.mark.slow
    @settings(max_examples=60)
    @given(seed=st.integers(min_value=0, max_value=2**31 - 1), depth=st.integers(min_value=0, max_value=4))
    def test_random_instances(self, seed, depth):
        """Test the rebuild on generated instances at every depth up to 4."""
        inst = random_instance(seed)
        assert _layer_mismatches(generate_run(inst.model, inst.observation, depth)) == []

    def test_deleted_edge_is_reported(self, fixture_b):
        """Test that removing the player-2 pair wa, wb shows up in the rebuild and as an Nm failure."""
        _, model, observation = fixture_b
        run = generate_run(model, observation, 2)
        wa, wb = run.world("wa"), run.world("wb")
        relation = dict(run.epistemic["2"])
        relation[wa] = relation[wa] - {wb}
        relation[wb] = relation[wb] - {wa}
        cut = ETLModel(
            name="cut",
            signature=run.signature,
            worlds=run.worlds,
            epistemic={**run.epistemic, "2": relation},
            trans=run.trans,
            valuation=run.valuation,
            frontier=run.frontier,
        )
        assert _layer_mismatches(run, cut) == ["2: wa wb", "2: wb wa"]
        report = check_normality(cut, observation)
        assert "Nm" in report.failed()
        assert any(set(w.worlds) == {"w", "wa", "wb"} for w in report.condition("Nm").witnesses)


class TestCloseFrontier:
    """Tests for the normal closure of truncated runs."""

    def test_closed_run_is_normal(self, fixture_b):
        """Test that the closure passes every condition without exemption."""
        _, model, observation = fixture_b
        run = generate_run(model, observation, 2)
        closed = close_frontier(run)
        assert closed.frontier == frozenset()
        report = check_normality(closed, observation)
        assert report.passed, report.text()

    def test_frontier_loses_action_atoms(self, fixture_a):
        """Test that frontier worlds no longer announce actions."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 1)
        closed = close_frontier(run)
        wa = run.world("wa")
        assert "act_c" in run.observed(wa, "2")
        assert closed.observed(wa, "2") == frozenset()

    def test_frontier_classes_rebuilt(self, fixture_a_blurred):
        """Test that frontier classes are rebuilt from blur and stripped valuations."""
        _, model, observation = fixture_a_blurred
        run = generate_run(model, observation, 1)
        closed = close_frontier(run)
        wa, wb = run.world("wa"), run.world("wb")
        assert closed.alternatives("2", wa) == {wa, wb}
        assert closed.alternatives("1", wa) == {wa}

    def test_untruncated_run_unchanged(self, fixture_a):
        """Test that a run reaching every leaf is closed already."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 3)
        closed = close_frontier(run)
        assert closed.valuation == run.valuation
        assert check_normality(closed, observation).passed

