"""Update product and depth-bounded run models."""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

from sig.errors import FormatError, InvariantViolation, UnknownIdError, UsageError
from sig.models.descriptions import ETLDescription
from sig.services.game import (
    ACTION_ATOM_PREFIX,
    EpistemicModel,
    GameStructure,
    ObservationModel,
    Signature,
    check_epistemic,
    close_relation,
    make_signature,
    require_same_signature,
)
from sig.services.worlds import Node, RunWorld, extend, node_label, ordered, unique_labels

logger = logging.getLogger(__name__)

Relation = Mapping[Node, frozenset[Node]]

_EMPTY: frozenset[Node] = frozenset()


# =============================================================================
# Epistemic temporal models
# =============================================================================


@dataclass(frozen=True)
class ETLModel:
    """Worlds with per-player epistemic relations, per-action transitions and a valuation.

    Relations are stored as successor maps; a world missing from a map has
    no successors. `frontier` lists worlds exempted from the Info condition.
    """

    name: str
    signature: Signature
    worlds: tuple[Node, ...]
    epistemic: Mapping[str, Relation]
    trans: Mapping[str, Relation]
    valuation: Mapping[tuple[Node, str], frozenset[str]]
    frontier: frozenset[Node] = frozenset()

    def has_world(self, world: Node) -> bool:
        return world in self.world_set

    def require_world(self, world: Node) -> None:
        if world not in self.world_set:
            raise UnknownIdError(f"unknown world: {node_label(world)}")

    def alternatives(self, player: str, world: Node) -> frozenset[Node]:
        return self.epistemic.get(player, {}).get(world, _EMPTY)

    def successors(self, action: str, world: Node) -> frozenset[Node]:
        return self.trans.get(action, {}).get(world, _EMPTY)

    def observed(self, world: Node, player: str) -> frozenset[str]:
        return self.valuation.get((world, player), frozenset())

    def act(self, world: Node) -> frozenset[str]:
        return frozenset(a for a in self.signature.actions if self.successors(a, world))

    @cached_property
    def world_set(self) -> frozenset[Node]:
        return frozenset(self.worlds)

    @cached_property
    def labels(self) -> dict[Node, str]:
        return unique_labels(self.worlds)

    def label(self, world: Node) -> str:
        return self.labels.get(world) or node_label(world)

    @cached_property
    def by_label(self) -> dict[str, Node]:
        index: dict[str, Node] = {}
        for world, label in self.labels.items():
            if label in index:
                raise InvariantViolation(f"{self.name}: label {label} names two worlds")
            index[label] = world
        return index

    def world(self, label: str) -> Node:
        """Resolve a world label (as printed in reports) back to the world."""
        try:
            return self.by_label[label]
        except KeyError:
            raise UnknownIdError(f"unknown world: {label}") from None

    def edge_count(self) -> tuple[int, int]:
        """(action edges, non-reflexive epistemic pairs counted once per player)."""
        actions = sum(len(v) for rel in self.trans.values() for v in rel.values())
        epistemic = 0
        for rel in self.epistemic.values():
            pairs = {frozenset((w, v)) for w, succ in rel.items() for v in succ if v != w}
            epistemic += len(pairs)
        return actions, epistemic


def build_etl(
    signature: Signature,
    worlds: Iterable[Node],
    epistemic: Mapping[str, Iterable[tuple[Node, Node]]],
    trans: Mapping[str, Iterable[tuple[Node, Node]]],
    valuation: Mapping[tuple[Node, str], Iterable[str]],
    *,
    name: str = "etl",
    frontier: Iterable[Node] = (),
    close: bool = True,
) -> ETLModel:
    """Build an ETL model from edge lists; `close` turns each epistemic relation into an equivalence."""
    world_list = ordered(worlds)
    known = set(world_list)
    atoms = set(signature.atoms)

    def check(world: Node) -> None:
        if world not in known:
            raise UnknownIdError(f"unknown world: {node_label(world)}")

    epi: dict[str, dict[Node, frozenset[Node]]] = {}
    for player in signature.players:
        pairs = list(epistemic.get(player, ()))
        for left, right in pairs:
            check(left)
            check(right)
        if close:
            epi[player] = close_relation(world_list, pairs)
        else:
            succ: dict[Node, set[Node]] = {}
            for left, right in pairs:
                succ.setdefault(left, set()).add(right)
            epi[player] = {w: frozenset(v) for w, v in succ.items()}
    for player in epistemic:
        signature.require_player(player)

    rel: dict[str, dict[Node, frozenset[Node]]] = {}
    for action, edges in trans.items():
        signature.require_action(action)
        succ = {}
        for source, target in edges:
            check(source)
            check(target)
            succ.setdefault(source, set()).add(target)
        rel[action] = {w: frozenset(v) for w, v in succ.items()}

    val: dict[tuple[Node, str], frozenset[str]] = {}
    for (world, player), given in valuation.items():
        check(world)
        signature.require_player(player)
        given_set = frozenset(given)
        unknown = given_set - atoms
        if unknown:
            raise UnknownIdError(f"unknown atoms at {node_label(world)}: {sorted(unknown)}")
        val[(world, player)] = given_set
    for world in world_list:
        for player in signature.players:
            val.setdefault((world, player), frozenset())

    frontier_set = frozenset(frontier)
    for world in frontier_set:
        check(world)

    return ETLModel(
        name=name,
        signature=signature,
        worlds=tuple(world_list),
        epistemic=epi,
        trans=rel,
        valuation=val,
        frontier=frontier_set,
    )


def validate_etl(raw: ETLDescription) -> ETLModel:
    """Turn a parsed ETL description into an ETL model; links are closed to equivalences."""
    signature = make_signature(raw.players, raw.actions, raw.atoms)
    if len(set(raw.worlds)) != len(raw.worlds):
        raise FormatError("duplicate world id", source=raw.name)
    trans: dict[str, list[tuple[Node, Node]]] = {}
    for t in raw.transitions:
        trans.setdefault(t.action, []).append((t.source, t.target))
    valuation: dict[tuple[Node, str], set[str]] = {}
    for entry in raw.valuation:
        valuation.setdefault((entry.world, entry.player), set()).update(entry.atoms)
    links: dict[str, list[tuple[Node, Node]]] = {}
    for link in raw.links:
        links.setdefault(link.player, []).append((link.left, link.right))
    return build_etl(
        signature,
        raw.worlds,
        links,
        trans,
        valuation,
        name=raw.name,
        frontier=raw.frontier,
    )


def etl_from_epistemic(model: EpistemicModel) -> ETLModel:
    """An epistemic model seen as an ETL model without transitions."""
    return ETLModel(
        name=model.name,
        signature=model.signature,
        worlds=model.worlds,
        epistemic=model.indist,
        trans={},
        valuation={(w, i): model.valuation(w, i) for w in model.worlds for i in model.signature.players},
    )


# =============================================================================
# Update product
# =============================================================================


def product(model: EpistemicModel, observation: ObservationModel) -> EpistemicModel:
    """M ⊗ U: pair every world with each action enabled at its state.

    (w,a) ~i (u,b) iff w ~i u, a and b are blurred for i, and i is told
    the same at the two successor states. An empty result is returned as an
    empty model (check `is_empty`).
    """
    game = model.game
    require_same_signature(game.signature, observation.signature, "model and observation")

    assign: dict[Node, Node] = {}
    origin: dict[Node, tuple[Node, str]] = {}
    for world in model.worlds:
        state = model.assign[world]
        for action in game.enabled_at(state):
            new = extend(world, action)
            target = game.successor(state, action)
            assert target is not None
            assign[new] = target
            origin[new] = (world, action)

    worlds = ordered(assign)
    indist: dict[str, dict[Node, frozenset[Node]]] = {}
    for player in game.signature.players:
        groups: dict[tuple[frozenset[Node], frozenset[str], frozenset[str]], set[Node]] = {}
        for new in worlds:
            world, action = origin[new]
            key = (
                model.alternatives(player, world),
                observation.blur_class(player, action),
                game.observed(assign[new], player),
            )
            groups.setdefault(key, set()).add(new)
        partition: dict[Node, frozenset[Node]] = {}
        for members in groups.values():
            cls = frozenset(members)
            for member in members:
                partition[member] = cls
        indist[player] = partition

    if not worlds:
        logger.warning(f"Product of {model.name} with {observation.name} is empty")
    return EpistemicModel(
        name=f"{model.name}*{observation.name}",
        game=game,
        worlds=tuple(worlds),
        assign=assign,
        indist=indist,
    )


# =============================================================================
# Run models
# =============================================================================


@dataclass(frozen=True, kw_only=True)
class RunModel(ETLModel):
    """The layered model F(M) truncated at `depth`; `stages[k]` is M ⊗ U^k."""

    game: GameStructure
    origin: EpistemicModel
    observation: ObservationModel
    depth: int
    layer: Mapping[Node, int]
    assign: Mapping[Node, Node]
    stages: tuple[EpistemicModel, ...] = field(repr=False, compare=False)

    def roots(self) -> list[Node]:
        return [w for w in self.worlds if self.layer[w] == 0]

    def root_world(self, world: Node) -> RunWorld:
        """The layer-0 run world for an origin world."""
        return RunWorld(world, ())


def lift(model: EpistemicModel) -> EpistemicModel:
    """Rename every world w to the empty-history run world (w)."""
    rename = {w: RunWorld(w, ()) for w in model.worlds}
    return EpistemicModel(
        name=model.name,
        game=model.game,
        worlds=tuple(rename[w] for w in model.worlds),
        assign={rename[w]: s for w, s in model.assign.items()},
        indist={
            player: {rename[w]: frozenset(rename[v] for v in cls) for w, cls in partition.items()}
            for player, partition in model.indist.items()
        },
        point=rename[model.point] if model.point is not None else None,
    )


def generate_run(model: EpistemicModel, observation: ObservationModel, depth: int) -> RunModel:
    """Iterate the product `depth` times, linking w -a-> w·a between layers."""
    if depth < 0:
        raise UsageError(f"depth must be non-negative, got {depth}")
    game = model.game
    require_same_signature(game.signature, observation.signature, "model and observation")

    stage = lift(model)
    stages = [stage]
    for k in range(depth):
        if stage.is_empty:
            break
        stage = product(stage, observation)
        if not stage.is_empty:
            try:
                check_epistemic(stage)
            except InvariantViolation as exc:
                raise InvariantViolation(f"layer {k + 1} is not an epistemic model: {exc}") from exc
        stages.append(stage)
        logger.debug(f"Run {model.name}: layer {k + 1} has {len(stage.worlds)} worlds")

    worlds: list[Node] = []
    layer: dict[Node, int] = {}
    assign: dict[Node, Node] = {}
    epistemic: dict[str, dict[Node, frozenset[Node]]] = {i: {} for i in game.signature.players}
    trans: dict[str, dict[Node, frozenset[Node]]] = {}
    valuation: dict[tuple[Node, str], frozenset[str]] = {}
    for k, current in enumerate(stages):
        for world in current.worlds:
            worlds.append(world)
            layer[world] = k
            assign[world] = current.assign[world]
            for player in game.signature.players:
                epistemic[player][world] = current.alternatives(player, world)
                valuation[(world, player)] = current.valuation(world, player)
            if k > 0:
                assert isinstance(world, RunWorld)
                parent = world.parent()
                action = world.history[-1]
                trans.setdefault(action, {})[parent] = frozenset({world})

    frontier = frozenset(w for w in worlds if layer[w] == depth)
    if frontier:
        logger.debug(f"Run {model.name} truncated at depth {depth}: {len(frontier)} frontier worlds")

    return RunModel(
        name=f"run({model.name},{observation.name},{depth})",
        signature=game.signature,
        worlds=tuple(worlds),
        epistemic=epistemic,
        trans=trans,
        valuation=valuation,
        frontier=frontier,
        game=game,
        origin=model,
        observation=observation,
        depth=depth,
        layer=layer,
        assign=assign,
        stages=tuple(stages),
    )


def run_assign(run: RunModel, world: Node) -> Node:
    """The state reached by executing the world's history from its root's state."""
    run.require_world(world)
    assert isinstance(world, RunWorld)
    state = run.origin.assign[world.root]
    for action in world.history:
        nxt = run.game.successor(state, action)
        if nxt is None:
            raise InvariantViolation(f"history of {node_label(world)} is not executable")
        state = nxt
    return state


def run_layers(run: RunModel) -> list[tuple[Node, ...]]:
    """Worlds grouped by layer, layer 0 first."""
    layers: list[list[Node]] = [[] for _ in range(max(run.layer.values(), default=-1) + 1)]
    for world in run.worlds:
        layers[run.layer[world]].append(world)
    return [tuple(ordered(ws)) for ws in layers]


def close_frontier(run: RunModel) -> ETLModel:
    """The normal closure of a truncated run.

    Frontier worlds lose their action atoms, and the frontier layer's
    relations are regrouped on the stripped valuations.
    """
    if not run.frontier:
        return ETLModel(
            name=f"{run.name}/closed",
            signature=run.signature,
            worlds=run.worlds,
            epistemic=run.epistemic,
            trans=run.trans,
            valuation=run.valuation,
        )

    valuation = dict(run.valuation)
    for world in run.frontier:
        for player in run.signature.players:
            valuation[(world, player)] = frozenset(
                p for p in run.valuation[(world, player)] if not p.startswith(ACTION_ATOM_PREFIX)
            )

    epistemic: dict[str, dict[Node, frozenset[Node]]] = {}
    for player in run.signature.players:
        relation = dict(run.epistemic[player])
        groups: dict[tuple[object, ...], set[Node]] = {}
        for world in ordered(run.frontier):
            assert isinstance(world, RunWorld)
            parent = world.parent()
            if parent is None:
                key: tuple[object, ...] = (run.epistemic[player][world], valuation[(world, player)])
            else:
                key = (
                    run.epistemic[player][parent],
                    run.observation.blur_class(player, world.history[-1]),
                    valuation[(world, player)],
                )
            groups.setdefault(key, set()).add(world)
        for members in groups.values():
            cls = frozenset(members)
            for member in members:
                relation[member] = cls
        epistemic[player] = relation

    return ETLModel(
        name=f"{run.name}/closed",
        signature=run.signature,
        worlds=run.worlds,
        epistemic=epistemic,
        trans=run.trans,
        valuation=valuation,
    )
