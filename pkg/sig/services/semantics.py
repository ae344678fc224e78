"""The two semantics of the dynamic epistemic language.

`DelEvaluator` reads [a] through the update product, building products
lazily level by level. `EtlEvaluator` reads [a] along the transitions of an
epistemic temporal model. Both compute truth sets and memoize them per
(level, formula).
"""

import logging
from collections.abc import Iterable

from sig.errors import (
    InvariantViolation,
    NotNormalError,
    SignatureMismatchError,
    UsageError,
)
from sig.models.reports import CheckReport
from sig.services.formula import (
    And,
    AtomAt,
    Box,
    Formula,
    Know,
    Not,
    Top,
    check_names,
    modal_action_depth,
)
from sig.services.game import (
    EpistemicModel,
    GameStructure,
    ObservationModel,
    build_game,
    check_epistemic,
    require_same_signature,
)
from sig.services.normality import GAME_CONDITIONS, check_normality
from sig.services.update import ETLModel, RunModel, generate_run, product
from sig.services.worlds import Node, RunWorld, extend, node_label

logger = logging.getLogger(__name__)


class DelEvaluator:
    """Truth sets of formulas over M, M⊗U, M⊗U⊗U, ..."""

    def __init__(self, model: EpistemicModel, observation: ObservationModel) -> None:
        require_same_signature(model.signature, observation.signature, "model and observation")
        self.observation = observation
        self.stages: list[EpistemicModel] = [model]
        self._cache: dict[tuple[int, Formula], frozenset[Node]] = {}

    @property
    def model(self) -> EpistemicModel:
        return self.stages[0]

    def stage(self, level: int) -> EpistemicModel:
        while len(self.stages) <= level:
            self.stages.append(product(self.stages[-1], self.observation))
            logger.debug(f"Built product level {len(self.stages) - 1} ({len(self.stages[-1].worlds)} worlds)")
        return self.stages[level]

    def truth_set(self, formula: Formula, level: int = 0) -> frozenset[Node]:
        key = (level, formula)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        model = self.stage(level)
        worlds = frozenset(model.worlds)
        match formula:
            case Top():
                result = worlds
            case AtomAt(atom, player):
                result = frozenset(w for w in model.worlds if atom in model.valuation(w, player))
            case Not(body):
                result = worlds - self.truth_set(body, level)
            case And(left, right):
                result = self.truth_set(left, level) & self.truth_set(right, level)
            case Know(player, body):
                inner = self.truth_set(body, level)
                result = frozenset(w for w in model.worlds if model.alternatives(player, w) <= inner)
            case Box(action, body):
                game = model.game
                enabled = [w for w in model.worlds if game.successor(model.assign[w], action) is not None]
                if enabled:
                    inner = self.truth_set(body, level + 1)
                    result = frozenset(w for w in enabled if extend(w, action) in inner)
                    result |= worlds.difference(enabled)
                else:
                    result = worlds
            case _:
                raise TypeError(f"not a formula: {formula!r}")
        self._cache[key] = result
        return result

    def holds(self, world: Node, formula: Formula) -> bool:
        self.model.require_world(world)
        return world in self.truth_set(formula, 0)

    def valid(self, formula: Formula, level: int = 0) -> bool:
        """True on every world of M ⊗ U^level."""
        return len(self.truth_set(formula, level)) == len(self.stage(level).worlds)


class EtlEvaluator:
    """Truth sets of formulas over one epistemic temporal model."""

    def __init__(self, model: ETLModel) -> None:
        self.model = model
        self._cache: dict[Formula, frozenset[Node]] = {}

    def truth_set(self, formula: Formula) -> frozenset[Node]:
        cached = self._cache.get(formula)
        if cached is not None:
            return cached
        model = self.model
        worlds = model.world_set
        match formula:
            case Top():
                result = worlds
            case AtomAt(atom, player):
                result = frozenset(w for w in model.worlds if atom in model.observed(w, player))
            case Not(body):
                result = worlds - self.truth_set(body)
            case And(left, right):
                result = self.truth_set(left) & self.truth_set(right)
            case Know(player, body):
                inner = self.truth_set(body)
                result = frozenset(w for w in model.worlds if model.alternatives(player, w) <= inner)
            case Box(action, body):
                inner = self.truth_set(body)
                result = frozenset(w for w in model.worlds if model.successors(action, w) <= inner)
            case _:
                raise TypeError(f"not a formula: {formula!r}")
        self._cache[formula] = result
        return result

    def holds(self, world: Node, formula: Formula) -> bool:
        self.model.require_world(world)
        return world in self.truth_set(formula)


def eval_del(
    game: GameStructure,
    model: EpistemicModel,
    world: Node,
    observation: ObservationModel,
    formula: Formula,
) -> bool:
    """M, w ⊨ φ with [a] read through M ⊗ U."""
    if model.game != game:
        raise SignatureMismatchError(f"model {model.name} is not over game {game.name}")
    require_same_signature(game.signature, observation.signature, "game and observation")
    check_names(formula, game.signature)
    return DelEvaluator(model, observation).holds(world, formula)


def eval_etl(model: ETLModel, world: Node, formula: Formula) -> bool:
    """N, w ⊩ φ with K_i over ~i-alternatives and [a] over a-successors."""
    check_names(formula, model.signature)
    return EtlEvaluator(model).holds(world, formula)


def epistemic_core(model: ETLModel) -> ETLModel:
    """The model without its transitions."""
    return ETLModel(
        name=f"core({model.name})",
        signature=model.signature,
        worlds=model.worlds,
        epistemic=model.epistemic,
        trans={},
        valuation=model.valuation,
        frontier=model.frontier,
    )


# =============================================================================
# Induced game and epistemic part
# =============================================================================


def _require_normal(
    model: ETLModel, observation: ObservationModel | None, conditions: Iterable[str] | None, what: str
) -> CheckReport:
    report = check_normality(model, observation, frontier=(), conditions=conditions)
    if not report.passed:
        raise NotNormalError(
            f"cannot induce {what} from {model.name}: fails {', '.join(report.failed())}", report
        )
    return report


def induce_game_from_etl(model: ETLModel, observation: ObservationModel | None = None) -> GameStructure:
    """G_N: worlds as states, transitions as moves, valuation as game information.

    Without an observation model only Det, Exturn and Info are required;
    with one, the model must be fully normal.
    """
    _require_normal(model, observation, None if observation is not None else GAME_CONDITIONS, "a game")
    trans: dict[tuple[Node, str], Node] = {}
    for action, relation in model.trans.items():
        for source, targets in relation.items():
            for target in targets:
                trans[(source, action)] = target
    game = build_game(
        model.signature,
        model.worlds,
        trans,
        model.valuation,
        name=f"G({model.name})",
        inject_action_atoms=False,
    )
    for world in model.worlds:
        if frozenset(game.enabled_at(world)) != model.act(world):
            raise InvariantViolation(f"e({node_label(world)}) differs from Act({node_label(world)})")
    return game


def induce_epistemic_part(model: ETLModel, observation: ObservationModel | None = None) -> EpistemicModel:
    """M_N: the worlds of N placed on themselves in G_N, with N's relations."""
    conditions = None if observation is not None else (*GAME_CONDITIONS, "Ke", "Eq")
    _require_normal(model, observation, conditions, "an epistemic part")
    game = induce_game_from_etl(model, observation)
    part = EpistemicModel(
        name=f"M({model.name})",
        game=game,
        worlds=model.worlds,
        assign={w: w for w in model.worlds},
        indist={i: dict(model.epistemic.get(i, {})) for i in model.signature.players},
    )
    check_epistemic(part)
    return part


# =============================================================================
# Validity transfer
# =============================================================================


def del_countermodel_to_etl(
    model: EpistemicModel, world: Node, formula: Formula, observation: ObservationModel
) -> tuple[RunModel, RunWorld]:
    """Turn M, w ⊭ φ into a run model falsifying φ at the root world (w)."""
    if eval_del(model.game, model, world, observation, formula):
        raise UsageError(f"{formula} holds at {node_label(world)}; nothing to transfer")
    run = generate_run(model, observation, modal_action_depth(formula))
    root = RunWorld(world, ())
    if eval_etl(run, root, formula):
        raise InvariantViolation(f"counterexample for {formula} lost in the run model")
    return run, root


def etl_countermodel_to_del(
    model: ETLModel, world: Node, formula: Formula, observation: ObservationModel
) -> tuple[EpistemicModel, Node]:
    """Turn N, s ⊮ φ (N normal) into the induced epistemic part falsifying φ at s."""
    if eval_etl(model, world, formula):
        raise UsageError(f"{formula} holds at {node_label(world)}; nothing to transfer")
    part = induce_epistemic_part(model, observation)
    if eval_del(part.game, part, world, observation, formula):
        raise InvariantViolation(f"counterexample for {formula} lost in the induced epistemic part")
    return part, world
