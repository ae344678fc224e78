"""Soundness suite for the axioms and rules of the proof system.

Axiom instances are evaluated with ⊨ at every world of the initial model.
Rules are checked as validity preservation along M, M⊗U, ..., M⊗U^d.
"""

import logging
import random
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from sig.config import get_settings
from sig.errors import SignatureMismatchError
from sig.models.reports import CheckReport, ConditionResult, Witness
from sig.services.corpus import random_formula
from sig.services.formula import (
    TOP,
    And,
    AtomAt,
    Box,
    Formula,
    Know,
    Not,
    action_available,
    conj_all,
    diamond,
    disj,
    disj_all,
    hat_k,
    iff,
    implies,
    turn,
)
from sig.services.game import EpistemicModel, GameStructure, ObservationModel
from sig.services.semantics import DelEvaluator
from sig.services.worlds import node_label

logger = logging.getLogger(__name__)

AXIOMS = ("TAUT", "DISTK", "DIST[a]", "T", "4", "5", "NM", "PR", "DET", "EXTURN", "INFO", "KE")
RULES = ("MP", "NECK", "GEN")


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    samples: int = 60
    depth: int = 2
    chain: int = 2
    jobs: int = 1


def observation_signature(atoms: tuple[str, ...], player: str, told: frozenset[str]) -> Formula:
    """φᵒ_i for the information set `told`: every atom asserted or denied for i."""
    return conj_all([AtomAt(p, player) if p in told else Not(AtomAt(p, player)) for p in atoms])


class _Suite:
    def __init__(self, game: GameStructure, model: EpistemicModel, observation: ObservationModel, config: SuiteConfig):
        self.game = game
        self.model = model
        self.observation = observation
        self.config = config
        self.signature = game.signature
        rng = random.Random(config.seed)
        self.pool = [random_formula(rng, self.signature, config.depth) for _ in range(config.samples)]
        self.pairs = list(zip(self.pool, self.pool[1:] + self.pool[:1], strict=True))
        self.cap = get_settings().witness_cap

    # -- axiom schemes ------------------------------------------------------

    def instances(self, name: str) -> Iterator[Formula]:
        sig = self.signature
        match name:
            case "TAUT":
                for phi, psi in self.pairs:
                    yield disj(phi, Not(phi))
                    yield implies(And(phi, psi), phi)
                    yield implies(phi, implies(psi, phi))
                    yield iff(Not(Not(phi)), phi)
            case "DISTK":
                for i in sig.players:
                    for phi, psi in self.pairs:
                        yield implies(Know(i, implies(phi, psi)), implies(Know(i, phi), Know(i, psi)))
            case "DIST[a]":
                for a in sig.actions:
                    for phi, psi in self.pairs:
                        yield implies(Box(a, implies(phi, psi)), implies(Box(a, phi), Box(a, psi)))
            case "T":
                for i in sig.players:
                    for phi in self.pool:
                        yield implies(Know(i, phi), phi)
            case "4":
                for i in sig.players:
                    for phi in self.pool:
                        yield implies(Know(i, phi), Know(i, Know(i, phi)))
            case "5":
                for i in sig.players:
                    for phi in self.pool:
                        yield implies(Not(Know(i, phi)), Know(i, Not(Know(i, phi))))
            case "NM":
                yield from self._nm_instances()
            case "PR":
                for a in sig.actions:
                    for i in sig.players:
                        blurred = sorted(self.observation.blur_class(i, a))
                        for phi in self.pool:
                            yield implies(
                                diamond(a, hat_k(i, phi)),
                                disj_all([hat_k(i, diamond(b, phi)) for b in blurred]),
                            )
            case "DET":
                for a in sig.actions:
                    for phi in self.pool:
                        yield implies(diamond(a, phi), Box(a, phi))
            case "EXTURN":
                for i in sig.players:
                    others = [Not(turn(sig, j)) for j in sig.players if j != i]
                    yield implies(turn(sig, i), conj_all(others))
            case "INFO":
                for a in sig.actions:
                    yield iff(diamond(a, TOP), action_available(a, sig))
            case "KE":
                for i in sig.players:
                    for p in sig.atoms:
                        atom = AtomAt(p, i)
                        yield And(
                            implies(atom, Know(i, atom)),
                            implies(Not(atom), Know(i, Not(atom))),
                        )

    def _nm_instances(self) -> Iterator[Formula]:
        sig = self.signature
        evaluator = DelEvaluator(self.model, self.observation)
        updated = evaluator.stage(1)
        for i in sig.players:
            realized = sorted(
                {updated.valuation(w, i) for w in updated.worlds}, key=lambda s: sorted(s)
            )
            signatures = [observation_signature(sig.atoms, i, told) for told in realized]
            for a in sig.actions:
                for b in sorted(self.observation.blur_class(i, a)):
                    for phi in self.pool:
                        for phi_o in signatures:
                            yield implies(
                                hat_k(i, diamond(b, And(phi, phi_o))),
                                Box(a, implies(phi_o, hat_k(i, phi))),
                            )

    def check_axiom(self, name: str) -> ConditionResult:
        result = ConditionResult(name=name)
        evaluator = DelEvaluator(self.model, self.observation)
        worlds = self.model.worlds
        for formula in self.instances(name):
            truth = evaluator.truth_set(formula)
            result.checked += len(worlds)
            for w in worlds:
                if w not in truth:
                    result.record(
                        Witness(condition=name, worlds=[node_label(w)], message=str(formula)), self.cap
                    )
        return result

    # -- rules --------------------------------------------------------------

    def _valid_on(self, evaluator: DelEvaluator, formula: Formula, levels: range) -> bool:
        return all(evaluator.valid(formula, k) for k in levels)

    def check_rule(self, name: str) -> ConditionResult:
        result = ConditionResult(name=name)
        evaluator = DelEvaluator(self.model, self.observation)
        chain = range(self.config.chain + 1)
        sig = self.signature
        # premises: random formulas plus instances of valid schemes
        premises = [*self.pool, *self.instances("KE"), *self.instances("INFO"), *self.instances("EXTURN")]

        def record(conclusion: Formula) -> None:
            result.record(Witness(condition=name, message=f"conclusion not valid: {conclusion}"), self.cap)

        if name == "MP":
            for phi in premises:
                for psi in self.pool:
                    result.checked += 1
                    bridge = implies(phi, psi)
                    if (
                        self._valid_on(evaluator, phi, chain)
                        and self._valid_on(evaluator, bridge, chain)
                        and not self._valid_on(evaluator, psi, chain)
                    ):
                        record(psi)
        elif name == "NECK":
            for phi in premises:
                for i in sig.players:
                    result.checked += 1
                    if self._valid_on(evaluator, phi, chain) and not self._valid_on(
                        evaluator, Know(i, phi), chain
                    ):
                        record(Know(i, phi))
        elif name == "GEN":
            below = range(self.config.chain)
            for phi in premises:
                for a in sig.actions:
                    result.checked += 1
                    if self._valid_on(evaluator, phi, chain) and not self._valid_on(
                        evaluator, Box(a, phi), below
                    ):
                        record(Box(a, phi))
        return result


def axiom_soundness_suite(
    game: GameStructure,
    model: EpistemicModel,
    observation: ObservationModel,
    config: SuiteConfig | None = None,
) -> CheckReport:
    """Evaluate every axiom scheme instance and rule spot test; the report counts instances and violations."""
    if model.game != game:
        raise SignatureMismatchError(f"model {model.name} is not over game {game.name}")
    config = config or SuiteConfig()
    suite = _Suite(game, model, observation, config)
    tasks: list[Callable[[], ConditionResult]] = [
        *(lambda n=n: suite.check_axiom(n) for n in AXIOMS),
        *(lambda n=n: suite.check_rule(n) for n in RULES),
    ]
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(lambda task: task(), tasks))
    else:
        results = [task() for task in tasks]

    report = CheckReport(kind="axioms", subject=f"{game.name}/{model.name}/{observation.name}", conditions=results)
    report.notes.append(
        f"{report.checked} instances, seed {config.seed}, {config.samples} sampled formulas of depth <= {config.depth}"
    )
    if not DelEvaluator(model, observation).stage(1).worlds:
        report.notes.append("product is empty: NM has no realized observation signatures")
    logger.debug(f"Axiom suite on {report.subject}: {report.violations} violations")
    return report
