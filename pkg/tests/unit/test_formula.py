"""Unit tests for formula syntax and the parser."""

import pytest

from sig.errors import FormulaNameError, FormulaSyntaxError
from sig.services.formula import (
    TOP,
    And,
    AtomAt,
    Box,
    Know,
    Not,
    bottom,
    diamond,
    disj,
    hat_k,
    iff,
    implies,
    is_action_free,
    modal_action_depth,
    parse_formula,
    size,
    turn,
)


class TestParser:
    """Tests for the ASCII formula syntax."""

    def test_box_knowledge_atom(self):
        """Test a nested box/knowledge formula."""
        assert parse_formula("[a] K2 [c] win@2") == Box("a", Know("2", Box("c", AtomAt("win", "2"))))

    def test_derived_connectives(self):
        """Test that derived connectives are desugared."""
        p, q = AtomAt("p", "1"), AtomAt("q", "1")
        assert parse_formula("p@1 | q@1") == disj(p, q)
        assert parse_formula("p@1 -> q@1") == implies(p, q)
        assert parse_formula("p@1 <-> q@1") == iff(p, q)
        assert parse_formula("<a> top") == diamond("a", TOP)
        assert parse_formula("Kh1 p@1") == hat_k("1", p)
        assert parse_formula("bot") == bottom()

    def test_precedence(self):
        """Test that & binds tighter than |, which binds tighter than ->."""
        p, q, r = AtomAt("p", "1"), AtomAt("q", "1"), AtomAt("r", "1")
        assert parse_formula("p@1 & q@1 | r@1") == disj(And(p, q), r)
        assert parse_formula("p@1 | q@1 -> r@1") == implies(disj(p, q), r)
        assert parse_formula("~p@1 & q@1") == And(Not(p), q)
        assert parse_formula("K1 p@1 & q@1") == And(Know("1", p), q)

    def test_implication_is_right_associative(self):
        """Test that a -> b -> c reads a -> (b -> c)."""
        p, q, r = AtomAt("p", "1"), AtomAt("q", "1"), AtomAt("r", "1")
        assert parse_formula("p@1 -> q@1 -> r@1") == implies(p, implies(q, r))

    def test_printed_form_parses_back(self):
        """Test that str() gives parseable text for the core constructors."""
        formula = And(Not(Know("2", Box("a", AtomAt("act_c", "2")))), TOP)
        assert parse_formula(str(formula)) == formula

    def test_turn_needs_signature(self, fixture_a):
        """Test that TURN expands into the player's available actions."""
        game, _, _ = fixture_a
        assert parse_formula("TURN1", game.signature) == turn(game.signature, "1")
        with pytest.raises(FormulaNameError):
            parse_formula("TURN1")

    def test_khat_prefers_declared_player(self):
        """Test that Kh<x> is read as K_h<x> when h<x> is a player."""
        from sig.services.game import make_signature

        sig = make_signature(["h1", "2"], {"h1": ["a"]}, ["p"])
        assert parse_formula("Kh1 p@2", sig) == Know("h1", AtomAt("p", "2"))

    def test_syntax_error_column(self):
        """Test that syntax errors report a 1-based column."""
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_formula("p@1 & & q@1")
        assert exc.value.column == 7

    def test_unexpected_end(self):
        """Test that a truncated formula is a syntax error."""
        with pytest.raises(FormulaSyntaxError, match="end"):
            parse_formula("K1")

    def test_unknown_names(self, fixture_a):
        """Test that names are checked against the signature."""
        game, _, _ = fixture_a
        with pytest.raises(FormulaNameError, match="atom"):
            parse_formula("nope@1", game.signature)
        with pytest.raises(FormulaNameError, match="player"):
            parse_formula("K3 top", game.signature)
        with pytest.raises(FormulaNameError, match="action"):
            parse_formula("[z] top", game.signature)


class TestMeasures:
    """Tests for formula measures."""

    def test_action_depth(self):
        """Test that action depth counts nested boxes only."""
        formula = parse_formula("[a] K2 [c] win@2 & <d> top")
        assert modal_action_depth(formula) == 2
        assert modal_action_depth(parse_formula("K1 K2 p@1")) == 0

    def test_action_free(self):
        """Test the action-free fragment."""
        assert is_action_free(parse_formula("K1 ~p@2"))
        assert not is_action_free(parse_formula("<a> top"))

    def test_size(self):
        """Test that size counts constructors."""
        assert size(TOP) == 1
        assert size(Not(AtomAt("p", "1"))) == 2
