"""Unit tests for the line-oriented file formats."""

import pytest

from sig.errors import FormatError, GameValidationError, UnknownIdError
from sig.services.formats import (
    load_game,
    parse_etl,
    parse_game,
    parse_model,
    parse_observation,
    render_etl,
    render_game,
    render_model,
    render_observation,
)
from sig.services.game import validate_epistemic, validate_game, validate_observation
from sig.services.normality import check_normality
from sig.services.update import generate_run, validate_etl
from sig.services.worlds import RunWorld, unique_labels


class TestParsers:
    """Tests for reading the formats."""

    def test_worked_game(self, data_dir):
        """Test that game A is read with its transitions and observations."""
        raw = load_game(data_dir / "game_a.g")
        assert raw.name == "A"
        assert raw.players == ["1", "2"]
        assert raw.actions == {"1": ["a", "b"], "2": ["c", "d"]}
        assert len(raw.transitions) == 6
        assert {(o.state, o.player) for o in raw.observations} == {("t", "1"), ("o1", "2")}

    def test_comments_and_detached_colon(self):
        """Test that comments are skipped and `1 :` reads like `1:`."""
        raw = parse_game("game g  # demo\nplayers 1\nactions 1 : a\nstates s\n# done\nend\n")
        assert raw.actions == {"1": ["a"]}

    def test_missing_end(self):
        """Test that a file without `end` is refused."""
        with pytest.raises(FormatError, match="end"):
            parse_game("game g\nplayers 1\nstates s\n")

    def test_unknown_keyword_line(self):
        """Test that errors carry the offending line number."""
        with pytest.raises(FormatError) as exc:
            parse_game("game g\nplayers 1\n\nstates s\nfoo bar\nend\n", "bad.g")
        assert exc.value.line == 5
        assert "bad.g:5" in str(exc.value)

    def test_bad_trans_arity(self):
        """Test that `trans` needs three arguments."""
        with pytest.raises(FormatError, match="3 arguments"):
            parse_game("game g\nplayers 1\nstates s\ntrans s a\nend\n")

    def test_model_header(self):
        """Test the `model <name> over <game>` header."""
        raw = parse_model("model m over g\nworlds w:s u:s\nlink 1: w u\npoint w\nend\n")
        assert raw.game == "g"
        assert raw.point == "w"
        with pytest.raises(FormatError, match="over"):
            parse_model("model m g\nworlds w:s\nend\n")

    def test_bad_world_entry(self):
        """Test that a world entry needs a state."""
        with pytest.raises(FormatError, match="world"):
            parse_model("model m over g\nworlds w\nend\n")

    def test_observation_only_blurs(self):
        """Test that observation files accept only `blur` lines."""
        raw = parse_observation("obsmodel u\nblur 2: a b\nend\n")
        assert [(b.player, b.left, b.right) for b in raw.blurs] == [("2", "a", "b")]
        with pytest.raises(FormatError):
            parse_observation("obsmodel u\nlink 2: a b\nend\n")


class TestValidation:
    """Tests for name checks after parsing."""

    def test_unknown_state_in_transition(self):
        """Test that transitions must name declared states."""
        raw = parse_game("game g\nplayers 1\nactions 1: a\nstates s\ntrans s a t\nend\n")
        with pytest.raises(UnknownIdError):
            validate_game(raw)

    def test_action_atoms_in_obs_lines(self):
        """Test that action atoms cannot be written by hand in game files."""
        raw = parse_game("game g\nplayers 1\nactions 1: a\nstates s\nobs s 1: act_a\nend\n")
        with pytest.raises(GameValidationError, match="reserved"):
            validate_game(raw)


class TestRenderers:
    """Tests that rendered files read back to the same structures."""

    def test_game_model_observation(self, fixture_b):
        """Test rendering and re-reading fixture B."""
        game, model, observation = fixture_b
        again = validate_game(parse_game(render_game(game)))
        assert again.signature == game.signature
        assert again.states == game.states
        for state in game.states:
            assert again.enabled_at(state) == game.enabled_at(state)
        model_again = validate_epistemic(parse_model(render_model(model)), again)
        assert model_again.worlds == model.worlds
        obs_again = validate_observation(parse_observation(render_observation(observation)), again.signature)
        assert obs_again.blur == observation.blur

    def test_run_as_etl_file(self, fixture_c):
        """Test that a written run reads back as an equally normal model."""
        _, model, observation = fixture_c
        run = generate_run(model, observation, 2)
        etl = validate_etl(parse_etl(render_etl(run)))
        assert len(etl.worlds) == len(run.worlds)
        assert etl.edge_count() == run.edge_count()
        assert check_normality(etl, observation).passed


class TestSharedLabels:
    """Tests for worlds whose compact labels coincide."""

    def test_run_labels_are_distinct(self, fixture_a_shadowed):
        """Test that the world `wa` and the update of w by a get different labels."""
        _, model, observation = fixture_a_shadowed
        run = generate_run(model, observation, 1)
        labels = [run.label(w) for w in run.worlds]
        assert sorted(labels) == ["w", "w.a", "wa", "wac", "wad", "wb"]
        assert run.layer[run.world("wa")] == 0
        assert run.layer[run.world("w.a")] == 1
        assert len(run.by_label) == len(run.worlds)

    def test_run_round_trip(self, fixture_a_shadowed):
        """Test that the written run is accepted again with every world kept."""
        _, model, observation = fixture_a_shadowed
        run = generate_run(model, observation, 1)
        etl = validate_etl(parse_etl(render_etl(run)))
        assert len(etl.worlds) == len(run.worlds)
        assert etl.edge_count() == run.edge_count()
        assert sorted(etl.successors("a", "w")) == ["w.a"]
        assert check_normality(etl, observation).passed

    def test_suffix_after_dotted_clash(self):
        """Test that a plain id keeps its label when a dotted label repeats it."""
        labels = unique_labels(["w.a", "wa", RunWorld("w", ("a",))])
        assert labels["w.a"] == "w.a"
        assert labels["wa"] == "wa"
        assert labels[RunWorld("w", ("a",))] == "w.a~1"

    def test_unambiguous_labels_stay_compact(self):
        """Test that compact labels are used when nothing clashes."""
        labels = unique_labels(["w", RunWorld("w", ("a",)), RunWorld("w", ("a", "c"))])
        assert list(labels.values()) == ["w", "wa", "wac"]
