"""Unit tests for the normality conditions."""

import pytest

from sig.errors import UsageError
from sig.services.game import make_signature
from sig.services.normality import (
    ALL_CONDITIONS,
    check_normality,
    etl_act,
    etl_turn,
    recheck_witness,
)
from sig.services.update import ETLModel, build_etl, generate_run


def _without_pair(run, player: str, left: str, right: str) -> ETLModel:
    """The run with one epistemic pair removed."""
    x, y = run.world(left), run.world(right)
    relation = dict(run.epistemic[player])
    relation[x] = relation[x] - {y}
    relation[y] = relation[y] - {x}
    epistemic = {**run.epistemic, player: relation}
    return ETLModel(
        name="tampered",
        signature=run.signature,
        worlds=run.worlds,
        epistemic=epistemic,
        trans=run.trans,
        valuation=run.valuation,
        frontier=run.frontier,
    )


class TestGeneratedRuns:
    """Tests that generated runs are normal."""

    def test_fixture_a_run_is_normal(self, fixture_a):
        """Test all conditions on the depth-2 run of game A."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 2)
        report = check_normality(run, observation)
        assert [c.name for c in report.conditions] == list(ALL_CONDITIONS)
        assert report.passed, report.text()
        assert report.checked > 0

    def test_fixture_b_and_c_runs_are_normal(self, fixture_b, fixture_c):
        """Test the blurred run of game B and the three-world run of game C."""
        for _, model, observation in (fixture_b, fixture_c):
            run = generate_run(model, observation, 2)
            assert check_normality(run, observation).passed

    def test_frontier_needs_exemption(self, fixture_a):
        """Test that the truncated layer fails Info unless exempted."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 1)
        report = check_normality(run, observation, frontier=())
        assert report.failed() == ["Info"]
        assert check_normality(run, observation).passed
        assert report.notes == []


class TestViolations:
    """Tests that tampered models produce witnesses."""

    def test_removed_edge_breaks_no_miracles(self, fixture_b):
        """Test that dropping wa ~2 wb is reported with a re-checkable witness."""
        _, model, observation = fixture_b
        run = generate_run(model, observation, 2)
        tampered = _without_pair(run, "2", "wa", "wb")
        report = check_normality(tampered, observation)
        nm = report.condition("Nm")
        assert not nm.passed
        witness = nm.witnesses[0]
        assert witness.player == "2"
        assert set(witness.worlds[2:]) == {"wa", "wb"}
        assert recheck_witness(tampered, observation, witness)
        assert not recheck_witness(run, observation, witness)

    def test_nondeterminism(self):
        """Test that two a-successors violate Det."""
        sig = make_signature(["1"], {"1": ["a"]}, [])
        model = build_etl(
            sig,
            ["s", "t", "u"],
            {},
            {"a": [("s", "t"), ("s", "u")]},
            {("s", "1"): ["act_a"]},
        )
        report = check_normality(model, conditions=["Det"])
        det = report.condition("Det")
        assert det.violations == 1
        assert det.witnesses[0].worlds == ["s", "t", "u"]
        assert recheck_witness(model, None, det.witnesses[0])

    def test_mixed_turn(self):
        """Test that actions of two players at one world violate Exturn."""
        sig = make_signature(["1", "2"], {"1": ["a"], "2": ["b"]}, [])
        model = build_etl(
            sig,
            ["s", "t"],
            {},
            {"a": [("s", "t")], "b": [("s", "t")]},
            {("s", "1"): ["act_a"], ("s", "2"): ["act_b"]},
        )
        report = check_normality(model)
        assert report.failed() == ["Exturn"]
        assert etl_act(model, "s") == {"a", "b"}
        assert etl_turn(model, "s") == frozenset()

    def test_missing_action_atom(self):
        """Test that an enabled action without its atom violates Info."""
        sig = make_signature(["1"], {"1": ["a"]}, [])
        model = build_etl(sig, ["s", "t"], {}, {"a": [("s", "t")]}, {})
        report = check_normality(model)
        info = report.condition("Info")
        assert info.violations == 1
        assert info.witnesses[0].actions == ["a"]
        assert info.witnesses[0].player == "1"

    def test_info_binds_owner_only(self):
        """Test that other players need not be told the mover's action atom."""
        sig = make_signature(["1", "2"], {"1": ["a"], "2": ["b"]}, [])
        model = build_etl(sig, ["s", "t"], {}, {"a": [("s", "t")]}, {("s", "1"): ["act_a"]})
        assert check_normality(model).passed
        assert etl_turn(model, "s") == {"1"}

    def test_known_evidence(self):
        """Test that relating worlds with different information violates Ke."""
        sig = make_signature(["1"], {"1": ["a"]}, ["p"])
        model = build_etl(sig, ["s", "t"], {"1": [("s", "t")]}, {}, {("s", "1"): ["p"]})
        report = check_normality(model)
        assert report.failed() == ["Ke"]
        assert recheck_witness(model, None, report.condition("Ke").witnesses[0])

    def test_unclosed_relation(self):
        """Test that Eq reports a relation that is not an equivalence."""
        sig = make_signature(["1"], {"1": ["a"]}, [])
        model = build_etl(sig, ["s", "t"], {"1": [("s", "t")]}, {}, {}, close=False)
        eq = check_normality(model, conditions=["Eq"]).condition("Eq")
        messages = {w.message for w in eq.witnesses}
        assert {"not reflexive", "not symmetric"} <= messages


class TestSelection:
    """Tests for condition selection."""

    def test_without_observation(self, fixture_a):
        """Test that Nm and Pr are skipped without an observation model."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 1)
        names = [c.name for c in check_normality(run).conditions]
        assert "Nm" not in names
        assert "Pr" not in names

    def test_requesting_nm_without_observation(self, fixture_a):
        """Test that asking for Nm without an observation model is an error."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 1)
        with pytest.raises(UsageError):
            check_normality(run, conditions=["Nm"])

    def test_unknown_condition(self, fixture_a):
        """Test that unknown condition names are refused."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 1)
        with pytest.raises(UsageError, match="unknown"):
            check_normality(run, observation, conditions=["Nope"])

    def test_listing(self, fixture_a):
        """Test the tab-separated listing format."""
        _, model, observation = fixture_a
        run = generate_run(model, observation, 1)
        lines = check_normality(run, observation).listing().splitlines()
        assert lines[0] == "Nm\tpass\t0"
        assert len(lines) == len(ALL_CONDITIONS)

    def test_thread_pool_keeps_report(self, fixture_b):
        """Test that checking on several threads gives the same report as one thread."""
        _, model, observation = fixture_b
        tampered = _without_pair(generate_run(model, observation, 2), "2", "wa", "wb")
        sequential = check_normality(tampered, observation)
        parallel = check_normality(tampered, observation, jobs=4)
        assert [c.name for c in parallel.conditions] == list(ALL_CONDITIONS)
        assert parallel.model_dump() == sequential.model_dump()
