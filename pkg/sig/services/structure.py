"""Structural comparisons between game rules and computed runs.

Covers the epistemic game structure induced by a game, p-morphism checks,
epistemic game trees generated with perfect recall, tracking maps, the
non-informative condition and the isomorphism characterisation.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass

from sig.config import get_settings
from sig.errors import MorphismError, NotCertaintyError, UsageError
from sig.models.reports import CheckReport, ConditionResult, Witness
from sig.services.game import GameStructure, ObservationModel
from sig.services.update import ETLModel, RunModel
from sig.services.worlds import Node, RunWorld, node_label, ordered

logger = logging.getLogger(__name__)

WorldMap = Mapping[Node, Node]


# =============================================================================
# Induced epistemic game structure
# =============================================================================


@dataclass(frozen=True, kw_only=True)
class EpistemicGameStructure(ETLModel):
    """E(G): states as worlds, related for i when i is told the same at both."""

    game: GameStructure
    perfect_information: bool


def _info_classes(game: GameStructure, player: str) -> dict[Node, frozenset[Node]]:
    groups: dict[frozenset[str], set[Node]] = {}
    for state in game.states:
        groups.setdefault(game.observed(state, player), set()).add(state)
    return {s: frozenset(members) for members in groups.values() for s in members}


def induce_epistemic_game(game: GameStructure) -> EpistemicGameStructure:
    """Build E(G) and set its perfect-information flag."""
    epistemic = {player: _info_classes(game, player) for player in game.signature.players}
    trans: dict[str, dict[Node, frozenset[Node]]] = {}
    for (source, action), target in game.trans.items():
        trans.setdefault(action, {})[source] = frozenset({target})
    perfect = all(len(cls) == 1 for rel in epistemic.values() for cls in rel.values())
    return EpistemicGameStructure(
        name=f"E({game.name})",
        signature=game.signature,
        worlds=game.states,
        epistemic=epistemic,
        trans=trans,
        valuation=dict(game.info),
        game=game,
        perfect_information=perfect,
    )


# =============================================================================
# p-morphisms
# =============================================================================


def check_p_morphism(
    h: WorldMap, source: ETLModel, target: ETLModel, *, epistemic: bool = True
) -> CheckReport:
    """Check the valuation, epistemic forth/back and action forth/back conditions.

    With `epistemic=False` only the valuation and action conditions are
    checked. Action-back is not required at the source's frontier worlds,
    whose successors were cut off by truncation.
    """
    for world in source.worlds:
        if world not in h:
            raise MorphismError(f"map is undefined on {node_label(world)}")
        if not target.has_world(h[world]):
            raise MorphismError(
                f"map sends {node_label(world)} to unknown world {node_label(h[world])}"
            )
    cap = get_settings().witness_cap
    players = source.signature.players
    actions = source.signature.actions

    val = ConditionResult(name="Val")
    for w in source.worlds:
        for i in players:
            val.checked += 1
            if source.observed(w, i) != target.observed(h[w], i):
                val.record(Witness(condition="Val", worlds=[node_label(w), node_label(h[w])], player=i), cap)

    epi_forth = ConditionResult(name="EpiForth")
    epi_back = ConditionResult(name="EpiBack")
    if epistemic:
        for i in players:
            for w in source.worlds:
                for v in ordered(source.alternatives(i, w)):
                    epi_forth.checked += 1
                    if h[v] not in target.alternatives(i, h[w]):
                        epi_forth.record(
                            Witness(condition="EpiForth", worlds=[node_label(w), node_label(v)], player=i),
                            cap,
                        )
                images = {h[v] for v in source.alternatives(i, w)}
                for v2 in ordered(target.alternatives(i, h[w])):
                    epi_back.checked += 1
                    if v2 not in images:
                        epi_back.record(
                            Witness(
                                condition="EpiBack",
                                worlds=[node_label(w), node_label(h[w]), node_label(v2)],
                                player=i,
                                message=f"no ~{i}-alternative of {node_label(w)} maps to {node_label(v2)}",
                            ),
                            cap,
                        )

    act_forth = ConditionResult(name="ActForth")
    act_back = ConditionResult(name="ActBack")
    for a in actions:
        for w in source.worlds:
            for v in ordered(source.successors(a, w)):
                act_forth.checked += 1
                if h[v] not in target.successors(a, h[w]):
                    act_forth.record(
                        Witness(condition="ActForth", worlds=[node_label(w), node_label(v)], actions=[a]),
                        cap,
                    )
            if w in source.frontier:
                continue
            images = {h[v] for v in source.successors(a, w)}
            for v2 in ordered(target.successors(a, h[w])):
                act_back.checked += 1
                if v2 not in images:
                    act_back.record(
                        Witness(
                            condition="ActBack",
                            worlds=[node_label(w), node_label(h[w]), node_label(v2)],
                            actions=[a],
                        ),
                        cap,
                    )

    conditions = [val, epi_forth, epi_back, act_forth, act_back] if epistemic else [val, act_forth, act_back]
    report = CheckReport(
        kind="p-morphism", subject=f"{source.name} -> {target.name}", conditions=conditions
    )
    if source.frontier:
        report.notes.append(f"ActBack not required at {len(source.frontier)} frontier worlds")
    return report


def run_to_game_map(run: RunModel) -> dict[Node, Node]:
    """The run's state assignment, as a world map into E(G)."""
    return dict(run.assign)


# =============================================================================
# Epistemic game trees
# =============================================================================


@dataclass(frozen=True, kw_only=True)
class EpistemicGameTree(ETLModel):
    """G restricted to the histories from `root`, related by synchronized information matching."""

    game: GameStructure
    root: Node
    depth: int
    layer: Mapping[Node, int]
    assign: Mapping[Node, Node]

    @property
    def root_node(self) -> RunWorld:
        return RunWorld(self.root, ())


def generate_game_tree(game: GameStructure, root: Node, depth: int) -> EpistemicGameTree:
    """Unravel `game` from `root` up to `depth` steps.

    Two histories of equal length are related for i when i was told the
    same at every pair of synchronized prefixes; layer by layer this is
    "parents related and equal information now".
    """
    game.require_state(root)
    if depth < 0:
        raise UsageError(f"depth must be non-negative, got {depth}")
    players = game.signature.players

    start = RunWorld(root, ())
    worlds: list[Node] = [start]
    layer: dict[Node, int] = {start: 0}
    assign: dict[Node, Node] = {start: root}
    epistemic: dict[str, dict[Node, frozenset[Node]]] = {i: {start: frozenset({start})} for i in players}
    trans: dict[str, dict[Node, frozenset[Node]]] = {}

    current: list[RunWorld] = [start]
    for k in range(depth):
        children: list[RunWorld] = []
        for node in current:
            state = assign[node]
            for action in game.enabled_at(state):
                child = node.extend(action)
                target = game.successor(state, action)
                assert target is not None
                children.append(child)
                layer[child] = k + 1
                assign[child] = target
                trans.setdefault(action, {})[node] = frozenset({child})
        for i in players:
            groups: dict[tuple[frozenset[Node], frozenset[str]], set[Node]] = {}
            for child in children:
                parent = child.parent()
                key = (epistemic[i][parent], game.observed(assign[child], i))
                groups.setdefault(key, set()).add(child)
            for members in groups.values():
                cls = frozenset(members)
                for member in members:
                    epistemic[i][member] = cls
        worlds.extend(children)
        current = children
        if not children:
            break

    return EpistemicGameTree(
        name=f"{game.name}|{node_label(root)}",
        signature=game.signature,
        worlds=tuple(worlds),
        epistemic=epistemic,
        trans=trans,
        valuation={(w, i): game.observed(assign[w], i) for w in worlds for i in players},
        frontier=frozenset(w for w in worlds if layer[w] == depth),
        game=game,
        root=root,
        depth=depth,
        layer=layer,
        assign=assign,
    )


def check_tree_persistence(tree: EpistemicGameTree) -> CheckReport:
    """Related histories with equally informative extensions stay related, and relations stay within a layer."""
    cap = get_settings().witness_cap
    persistence = ConditionResult(name="Persistence")
    synchronous = ConditionResult(name="Synchronous")
    for i in tree.signature.players:
        for w in tree.worlds:
            for u in ordered(tree.alternatives(i, w)):
                synchronous.checked += 1
                if tree.layer[w] != tree.layer[u]:
                    synchronous.record(
                        Witness(condition="Synchronous", worlds=[node_label(w), node_label(u)], player=i),
                        cap,
                    )
                for a in tree.signature.actions:
                    for wa in tree.successors(a, w):
                        for b in tree.signature.actions:
                            for ub in tree.successors(b, u):
                                if tree.observed(wa, i) != tree.observed(ub, i):
                                    continue
                                persistence.checked += 1
                                if ub not in tree.alternatives(i, wa):
                                    persistence.record(
                                        Witness(
                                            condition="Persistence",
                                            worlds=[node_label(wa), node_label(ub)],
                                            actions=[a, b],
                                            player=i,
                                        ),
                                        cap,
                                    )
    return CheckReport(kind="tree", subject=tree.name, conditions=[persistence, synchronous])


# =============================================================================
# Tracking, non-informativeness and isomorphism
# =============================================================================


def tracking_map(run: RunModel, tree: EpistemicGameTree) -> dict[Node, Node]:
    """g(w, a1..an) = (f(w), a1..an), defined on run worlds whose root is placed on the tree root."""
    g: dict[Node, Node] = {}
    for world in run.worlds:
        assert isinstance(world, RunWorld)
        if run.origin.assign[world.root] != tree.root:
            continue
        image = RunWorld(tree.root, world.history)
        if tree.has_world(image):
            g[world] = image
    return g


def check_non_informative(observation: ObservationModel, run: RunModel) -> CheckReport:
    """No blur-distinguished pair of moves from related worlds leads to equally informative worlds."""
    cap = get_settings().witness_cap
    result = ConditionResult(name="NonInformative")
    actions = run.signature.actions
    for i in run.signature.players:
        for w in run.worlds:
            moves_w = [(a, s) for a in actions for s in ordered(run.successors(a, w))]
            if not moves_w:
                continue
            for u in ordered(run.alternatives(i, w)):
                for b in actions:
                    for t in ordered(run.successors(b, u)):
                        for a, s in moves_w:
                            if observation.blurred(i, a, b):
                                continue
                            result.checked += 1
                            if run.observed(s, i) == run.observed(t, i):
                                result.record(
                                    Witness(
                                        condition="NonInformative",
                                        worlds=[node_label(x) for x in (w, u, s, t)],
                                        actions=[a, b],
                                        player=i,
                                        message="distinguished actions, equal successor information",
                                    ),
                                    cap,
                                )
    report = CheckReport(kind="non-informative", subject=f"{observation.name} on {run.name}", conditions=[result])
    report.notes.append(f"verdict holds up to depth {run.depth}")
    return report


def check_isomorphism(g: WorldMap, run: RunModel, tree: EpistemicGameTree) -> CheckReport:
    """Check that `g` is an isomorphism from the run onto the tree, layer by layer up to the common depth."""
    if len(run.origin.worlds) != 1:
        raise NotCertaintyError(
            f"isomorphism check needs a single-world initial model, {run.origin.name} has "
            f"{len(run.origin.worlds)} worlds"
        )
    cap = get_settings().witness_cap
    depth = min(run.depth, tree.depth)
    domain = [w for w in run.worlds if run.layer[w] <= depth]
    codomain = [n for n in tree.worlds if tree.layer[n] <= depth]

    total = ConditionResult(name="Total", checked=len(domain))
    for w in domain:
        if w not in g or not tree.has_world(g[w]):
            total.record(Witness(condition="Total", worlds=[node_label(w)]), cap)
    mapped = [w for w in domain if w in g and tree.has_world(g[w])]
    inverse: dict[Node, Node] = {}
    bijective = ConditionResult(name="Bijective")
    for w in mapped:
        bijective.checked += 1
        if g[w] in inverse:
            bijective.record(
                Witness(condition="Bijective", worlds=[node_label(inverse[g[w]]), node_label(w)], message="not injective"),
                cap,
            )
        inverse[g[w]] = w
    for n in codomain:
        bijective.checked += 1
        if n not in inverse:
            bijective.record(Witness(condition="Bijective", worlds=[node_label(n)], message="not onto"), cap)

    trans = ConditionResult(name="Trans")
    epistemic = ConditionResult(name="Epistemic")
    valuation = ConditionResult(name="Valuation")
    actions = run.signature.actions
    players = run.signature.players
    for w in mapped:
        for i in players:
            valuation.checked += 1
            if run.observed(w, i) != tree.observed(g[w], i):
                valuation.record(Witness(condition="Valuation", worlds=[node_label(w)], player=i), cap)
        if run.layer[w] < depth:
            for a in actions:
                ran = {g[v] for v in run.successors(a, w) if v in g}
                grown = set(tree.successors(a, g[w]))
                trans.checked += 1
                if ran != grown or len(ran) != len(run.successors(a, w)):
                    trans.record(Witness(condition="Trans", worlds=[node_label(w)], actions=[a]), cap)
        for i in players:
            for u in mapped:
                if run.layer[u] != run.layer[w]:
                    continue
                epistemic.checked += 1
                related = u in run.alternatives(i, w)
                frown = g[u] in tree.alternatives(i, g[w])
                if related != frown:
                    epistemic.record(
                        Witness(
                            condition="Epistemic",
                            worlds=[node_label(w), node_label(u)],
                            player=i,
                            message=f"run {'relates' if related else 'separates'} them, "
                            f"tree {'relates' if frown else 'separates'} them",
                        ),
                        cap,
                    )

    report = CheckReport(
        kind="isomorphism",
        subject=f"{run.name} -> {tree.name}",
        conditions=[total, bijective, trans, epistemic, valuation],
    )
    report.notes.append(f"compared up to depth {depth}")
    logger.debug(f"Isomorphism {report.subject}: {report.failed() or 'holds'}")
    return report
