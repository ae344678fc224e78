"""Unit tests for the axiom soundness suite."""

import pytest

from sig.errors import SignatureMismatchError
from sig.services.axioms import AXIOMS, RULES, SuiteConfig, axiom_soundness_suite, observation_signature
from sig.services.formula import And, AtomAt, Not

SMALL = SuiteConfig(samples=12, depth=2, chain=1)


class TestObservationSignature:
    """Tests for observation signature formulas."""

    def test_asserts_and_denies(self):
        """Test that told atoms are asserted and the rest denied."""
        formula = observation_signature(("p", "q"), "1", frozenset({"q"}))
        assert formula == And(Not(AtomAt("p", "1")), AtomAt("q", "1"))


class TestSuite:
    """Tests for the full suite on the worked examples."""

    def test_no_violations(self, fixture_a, fixture_a_blurred, fixture_b, fixture_c):
        """Test that no axiom or rule is violated."""
        for game, model, observation in (fixture_a, fixture_a_blurred, fixture_b, fixture_c):
            report = axiom_soundness_suite(game, model, observation, SMALL)
            assert report.passed, report.text()

    def test_every_scheme_is_exercised(self, fixture_b):
        """Test that each axiom and rule appears with checked instances."""
        game, model, observation = fixture_b
        report = axiom_soundness_suite(game, model, observation, SMALL)
        assert [c.name for c in report.conditions] == [*AXIOMS, *RULES]
        for name in AXIOMS:
            assert report.condition(name).checked > 0, name
        assert "seed 0" in report.notes[0]

    def test_parallel_matches_sequential(self, fixture_c):
        """Test that running the schemes on a pool gives the same counts."""
        game, model, observation = fixture_c
        sequential = axiom_soundness_suite(game, model, observation, SMALL)
        parallel = axiom_soundness_suite(game, model, observation, SuiteConfig(samples=12, depth=2, chain=1, jobs=3))
        assert [(c.name, c.checked) for c in parallel.conditions] == [
            (c.name, c.checked) for c in sequential.conditions
        ]

    def test_model_over_other_game(self, fixture_a, fixture_c):
        """Test that the model must be over the given game."""
        game_a, _, observation = fixture_a
        _, model_c, _ = fixture_c
        with pytest.raises(SignatureMismatchError):
            axiom_soundness_suite(game_a, model_c, observation, SMALL)
