"""G-bisimulation between epistemic models over one game."""

import logging
from collections.abc import Iterable
from dataclasses import dataclass

from sig.config import get_settings
from sig.errors import NotBisimilarError, SignatureMismatchError
from sig.models.reports import CheckReport, ConditionResult, Witness
from sig.services.formula import Formula
from sig.services.game import EpistemicModel, GameStructure, ObservationModel
from sig.services.semantics import DelEvaluator
from sig.services.update import ETLModel
from sig.services.worlds import Node, extend, node_key, node_label

logger = logging.getLogger(__name__)

Pair = tuple[Node, Node]


@dataclass(frozen=True)
class GBisimulation:
    """A relation between the worlds of `left` and `right`."""

    left: EpistemicModel
    right: EpistemicModel
    relation: frozenset[Pair]

    def __contains__(self, pair: object) -> bool:
        return pair in self.relation

    def __len__(self) -> int:
        return len(self.relation)

    def pairs(self) -> list[Pair]:
        return sorted(self.relation, key=lambda p: (node_key(p[0]), node_key(p[1])))


def _require_game(model: EpistemicModel, game: GameStructure) -> None:
    if model.game != game:
        raise SignatureMismatchError(f"game mismatch: {model.name} is not over {game.name}")


def _zig(relation: set[Pair], source: EpistemicModel, target: EpistemicModel, w: Node, u: Node, flip: bool) -> bool:
    for player in source.signature.players:
        for w2 in source.alternatives(player, w):
            matched = any(
                ((u2, w2) if flip else (w2, u2)) in relation for u2 in target.alternatives(player, u)
            )
            if not matched:
                return False
    return True


def largest_g_bisimulation(left: EpistemicModel, right: EpistemicModel, game: GameStructure) -> GBisimulation:
    """Greatest fixpoint: start from the pairs placed on the same state, drop Zig/Zag failures until stable."""
    _require_game(left, game)
    _require_game(right, game)
    by_state: dict[Node, list[Node]] = {}
    for u in right.worlds:
        by_state.setdefault(right.assign[u], []).append(u)
    relation: set[Pair] = {(w, u) for w in left.worlds for u in by_state.get(left.assign[w], [])}

    rounds = 0
    while True:
        rounds += 1
        dropped = {
            (w, u)
            for w, u in relation
            if not _zig(relation, left, right, w, u, flip=False)
            or not _zig(relation, right, left, u, w, flip=True)
        }
        if not dropped:
            break
        relation -= dropped
    logger.debug(f"G-bisimulation {left.name}/{right.name}: {len(relation)} pairs after {rounds} rounds")
    return GBisimulation(left=left, right=right, relation=frozenset(relation))


def verify_g_bisimulation(relation: Iterable[Pair], left: EpistemicModel, right: EpistemicModel) -> CheckReport:
    """Check Inv, Zig and Zag pair by pair."""
    pairs = set(relation)
    cap = get_settings().witness_cap
    inv = ConditionResult(name="Inv")
    zig = ConditionResult(name="Zig")
    zag = ConditionResult(name="Zag")
    for w, u in sorted(pairs, key=lambda p: (node_key(p[0]), node_key(p[1]))):
        labels = [node_label(w), node_label(u)]
        inv.checked += 1
        if left.assign[w] != right.assign[u]:
            inv.record(Witness(condition="Inv", worlds=labels), cap)
        zig.checked += 1
        if not _zig(pairs, left, right, w, u, flip=False):
            zig.record(Witness(condition="Zig", worlds=labels), cap)
        zag.checked += 1
        if not _zig(pairs, right, left, u, w, flip=True):
            zag.record(Witness(condition="Zag", worlds=labels), cap)
    return CheckReport(kind="g-bisimulation", subject=f"{left.name} / {right.name}", conditions=[inv, zig, zag])


def lift_transition_pairs(model: ETLModel) -> list[Pair]:
    """{((s,a), t) | s -a-> t}: pairs between M_N ⊗ U and M_N."""
    pairs = []
    for action in model.signature.actions:
        for source in model.worlds:
            for target in model.successors(action, source):
                pairs.append((extend(source, action), target))
    return sorted(pairs, key=lambda p: (node_key(p[0]), node_key(p[1])))


def check_invariance(
    left: EpistemicModel,
    world: Node,
    right: EpistemicModel,
    other: Node,
    game: GameStructure,
    corpus: Iterable[Formula],
    observation: ObservationModel,
) -> CheckReport:
    """Evaluate every corpus formula at both ends of a bisimilar pair and list disagreements."""
    left.require_world(world)
    right.require_world(other)
    bisim = largest_g_bisimulation(left, right, game)
    if (world, other) not in bisim:
        raise NotBisimilarError(f"{node_label(world)} and {node_label(other)} are not G-bisimilar")

    cap = get_settings().witness_cap
    result = ConditionResult(name="Agreement")
    left_eval = DelEvaluator(left, observation)
    right_eval = DelEvaluator(right, observation)
    for formula in corpus:
        result.checked += 1
        here = left_eval.holds(world, formula)
        there = right_eval.holds(other, formula)
        if here != there:
            result.record(
                Witness(
                    condition="Agreement",
                    worlds=[node_label(world), node_label(other)],
                    message=f"{formula}: {here} vs {there}",
                ),
                cap,
            )
    return CheckReport(
        kind="invariance",
        subject=f"{left.name},{node_label(world)} / {right.name},{node_label(other)}",
        conditions=[result],
    )
