"""Game structures, epistemic models and observation models.

The three inputs of a computed run: the rules of the game (arena plus game
information), the players' initial uncertainty, and their observation
power over actions.
"""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from sig.errors import (
    GameValidationError,
    InvariantViolation,
    ModelValidationError,
    ObservationValidationError,
    SignatureMismatchError,
    UnknownIdError,
)
from sig.models.descriptions import GameDescription, ModelDescription, ObservationDescription
from sig.services.worlds import Node, node_key, node_label, ordered

logger = logging.getLogger(__name__)

ACTION_ATOM_PREFIX = "act_"

Partition = Mapping[Node, frozenset[Node]]


def action_atom(action: str) -> str:
    """The reserved atom announcing that `action` is available."""
    return f"{ACTION_ATOM_PREFIX}{action}"


def close_relation(elements: Iterable[Node], pairs: Iterable[tuple[Node, Node]]) -> dict[Node, frozenset[Node]]:
    """Reflexive, symmetric, transitive closure of `pairs`, as element -> class."""
    parent: dict[Node, Node] = {e: e for e in elements}

    def find(x: Node) -> Node:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for left, right in pairs:
        if left not in parent or right not in parent:
            missing = left if left not in parent else right
            raise UnknownIdError(f"unknown id in pair: {node_label(missing)}")
        root_l, root_r = find(left), find(right)
        if root_l != root_r:
            parent[root_r] = root_l

    groups: dict[Node, set[Node]] = {}
    for e in parent:
        groups.setdefault(find(e), set()).add(e)
    classes = {root: frozenset(members) for root, members in groups.items()}
    return {e: classes[find(e)] for e in parent}


def partition_pairs(partition: Partition) -> list[tuple[Node, Node]]:
    """Non-reflexive pairs (u, v) with u before v, in canonical order."""
    pairs = []
    for u in ordered(partition):
        for v in ordered(partition[u]):
            if node_key(u) < node_key(v):
                pairs.append((u, v))
    return pairs


# =============================================================================
# Signature
# =============================================================================


@dataclass(frozen=True)
class Signature:
    """Players, actions partitioned by owner, and atoms."""

    players: tuple[str, ...]
    owners: Mapping[str, str]
    user_atoms: tuple[str, ...]

    @property
    def actions(self) -> tuple[str, ...]:
        return tuple(sorted(self.owners))

    @property
    def action_atoms(self) -> tuple[str, ...]:
        return tuple(action_atom(a) for a in self.actions)

    @property
    def atoms(self) -> tuple[str, ...]:
        return tuple(sorted((*self.user_atoms, *self.action_atoms)))

    def actions_of(self, player: str) -> tuple[str, ...]:
        return tuple(a for a in self.actions if self.owners[a] == player)

    def owner(self, action: str) -> str:
        try:
            return self.owners[action]
        except KeyError:
            raise UnknownIdError(f"unknown action: {action}") from None

    def require_player(self, player: str) -> None:
        if player not in self.players:
            raise UnknownIdError(f"unknown player: {player}")

    def require_action(self, action: str) -> None:
        if action not in self.owners:
            raise UnknownIdError(f"unknown action: {action}")


def make_signature(
    players: Iterable[str],
    actions_by_player: Mapping[str, Iterable[str]],
    user_atoms: Iterable[str] = (),
) -> Signature:
    """Validate and build a signature."""
    player_list = list(players)
    if not player_list:
        raise GameValidationError("player set is empty")
    if len(set(player_list)) != len(player_list):
        raise GameValidationError("duplicate player id")

    owners: dict[str, str] = {}
    for player, actions in actions_by_player.items():
        if player not in player_list:
            raise UnknownIdError(f"actions declared for unknown player: {player}")
        for action in actions:
            if action in owners:
                raise GameValidationError(
                    f"action {action} owned by both {owners[action]} and {player}"
                )
            owners[action] = player
    if not owners:
        raise GameValidationError("action set is empty")

    atoms = list(user_atoms)
    for atom in atoms:
        if atom.startswith(ACTION_ATOM_PREFIX):
            raise GameValidationError(
                f"atom {atom} collides with the reserved '{ACTION_ATOM_PREFIX}' prefix"
            )
    if len(set(atoms)) != len(atoms):
        raise GameValidationError("duplicate atom")

    return Signature(
        players=tuple(sorted(player_list)),
        owners=dict(sorted(owners.items())),
        user_atoms=tuple(sorted(atoms)),
    )


# =============================================================================
# Game structure
# =============================================================================


@dataclass(frozen=True)
class GameStructure:
    """Arena (states, partial deterministic transitions) plus game information."""

    name: str
    signature: Signature
    states: tuple[Node, ...]
    trans: Mapping[tuple[Node, str], Node]
    info: Mapping[tuple[Node, str], frozenset[str]]
    enabled: Mapping[Node, tuple[str, ...]] = field(repr=False, compare=False)

    def has_state(self, state: Node) -> bool:
        return state in self.enabled

    def require_state(self, state: Node) -> None:
        if state not in self.enabled:
            raise UnknownIdError(f"unknown state: {node_label(state)}")

    def enabled_at(self, state: Node) -> tuple[str, ...]:
        return self.enabled[state]

    def successor(self, state: Node, action: str) -> Node | None:
        return self.trans.get((state, action))

    def observed(self, state: Node, player: str) -> frozenset[str]:
        return self.info[(state, player)]


def available_actions(game: GameStructure, state: Node) -> frozenset[str]:
    """e(s): the actions with a defined transition at `state`."""
    game.require_state(state)
    return frozenset(game.enabled_at(state))


def turn_player(game: GameStructure, state: Node) -> str | None:
    """ι(s): the player owning every enabled action, or None at a leaf."""
    game.require_state(state)
    enabled = game.enabled_at(state)
    if not enabled:
        return None
    return game.signature.owner(enabled[0])


def player_actions(game: GameStructure, state: Node, player: str) -> frozenset[str]:
    """e_i(s): e(s) when it is `player`'s turn, otherwise empty."""
    game.signature.require_player(player)
    if turn_player(game, state) != player:
        return frozenset()
    return frozenset(game.enabled_at(state))


def build_game(
    signature: Signature,
    states: Iterable[Node],
    trans: Mapping[tuple[Node, str], Node],
    info: Mapping[tuple[Node, str], Iterable[str]],
    *,
    name: str = "game",
    inject_action_atoms: bool = True,
) -> GameStructure:
    """Check every game-structure invariant and build the structure.

    With `inject_action_atoms` the owner's action atoms are added to the
    given information; otherwise they must already be there.
    """
    state_list = ordered(states)
    if not state_list:
        raise GameValidationError("state set is empty")
    known = set(state_list)
    if len(known) != len(state_list):
        raise GameValidationError("duplicate state id")

    enabled: dict[Node, list[str]] = {s: [] for s in state_list}
    for (source, action), target in trans.items():
        if source not in known:
            raise UnknownIdError(f"transition from unknown state: {node_label(source)}")
        if target not in known:
            raise UnknownIdError(f"transition to unknown state: {node_label(target)}")
        signature.require_action(action)
        enabled[source].append(action)

    for state, actions in enabled.items():
        owners = {signature.owners[a] for a in actions}
        if len(owners) > 1:
            raise GameValidationError(
                f"mixed-player turn at state {node_label(state)}: "
                f"actions {sorted(actions)} belong to players {sorted(owners)}"
            )

    atoms = set(signature.atoms)
    full_info: dict[tuple[Node, str], frozenset[str]] = {}
    for (state, player), given in info.items():
        if state not in known:
            raise UnknownIdError(f"information for unknown state: {node_label(state)}")
        signature.require_player(player)
        given_set = frozenset(given)
        unknown = given_set - atoms
        if unknown:
            raise UnknownIdError(f"unknown atoms at {node_label(state)}: {sorted(unknown)}")
        full_info[(state, player)] = given_set

    for state in state_list:
        for player in signature.players:
            observed = full_info.get((state, player), frozenset())
            if inject_action_atoms:
                observed = observed | {
                    action_atom(a) for a in enabled[state] if signature.owners[a] == player
                }
            full_info[(state, player)] = observed

    for state in state_list:
        for player in signature.players:
            for action in signature.actions_of(player):
                announced = action_atom(action) in full_info[(state, player)]
                defined = (state, action) in trans
                if announced != defined:
                    raise GameValidationError(
                        f"game information of player {player} at {node_label(state)} "
                        f"{'announces' if announced else 'omits'} {action_atom(action)} "
                        f"but {action} is {'not ' if not defined else ''}available"
                    )

    game = GameStructure(
        name=name,
        signature=signature,
        states=tuple(state_list),
        trans=dict(trans),
        info=full_info,
        enabled={s: tuple(sorted(a)) for s, a in enabled.items()},
    )
    logger.debug(f"Built game {name}: {len(state_list)} states, {len(trans)} transitions")
    return game


def validate_game(raw: GameDescription) -> GameStructure:
    """Turn a parsed game description into a validated game structure."""
    signature = make_signature(raw.players, raw.actions, raw.atoms)

    trans: dict[tuple[Node, str], Node] = {}
    for t in raw.transitions:
        if (t.source, t.action) in trans:
            raise GameValidationError(f"duplicate transition for ({t.source}, {t.action})")
        trans[(t.source, t.action)] = t.target

    info: dict[tuple[Node, str], set[str]] = {}
    for obs in raw.observations:
        for atom in obs.atoms:
            if atom.startswith(ACTION_ATOM_PREFIX):
                raise GameValidationError(
                    f"atom {atom} at {obs.state} uses the reserved '{ACTION_ATOM_PREFIX}' prefix; "
                    "action atoms are added automatically"
                )
            if atom not in signature.user_atoms:
                raise UnknownIdError(f"unknown atom {atom} at {obs.state}")
        info.setdefault((obs.state, obs.player), set()).update(obs.atoms)

    return build_game(signature, raw.states, trans, info, name=raw.name)


# =============================================================================
# Epistemic model
# =============================================================================


@dataclass(frozen=True)
class EpistemicModel:
    """Worlds placed on game states, with per-player indistinguishability."""

    name: str
    game: GameStructure
    worlds: tuple[Node, ...]
    assign: Mapping[Node, Node]
    indist: Mapping[str, Partition]
    point: Node | None = None

    @property
    def is_empty(self) -> bool:
        return not self.worlds

    @property
    def signature(self) -> Signature:
        return self.game.signature

    def has_world(self, world: Node) -> bool:
        return world in self.assign

    def require_world(self, world: Node) -> None:
        if world not in self.assign:
            raise UnknownIdError(f"unknown world: {node_label(world)}")

    def valuation(self, world: Node, player: str) -> frozenset[str]:
        return self.game.observed(self.assign[world], player)

    def alternatives(self, player: str, world: Node) -> frozenset[Node]:
        return self.indist[player][world]

    def related(self, player: str, left: Node, right: Node) -> bool:
        return right in self.indist[player][left]


def build_epistemic(
    game: GameStructure,
    assign: Mapping[Node, Node],
    links: Mapping[str, Iterable[tuple[Node, Node]]],
    *,
    name: str = "model",
    point: Node | None = None,
) -> EpistemicModel:
    """Close generator pairs per player and check compatibility with the game information."""
    worlds = ordered(assign)
    if not worlds:
        raise ModelValidationError("epistemic model has no worlds")
    for world, state in assign.items():
        if not game.has_state(state):
            raise UnknownIdError(f"world {node_label(world)} assigned to unknown state {node_label(state)}")
    if point is not None and point not in assign:
        raise UnknownIdError(f"unknown point world: {node_label(point)}")

    indist: dict[str, dict[Node, frozenset[Node]]] = {}
    for player in game.signature.players:
        pairs = list(links.get(player, ()))
        for left, right in pairs:
            if left not in assign or right not in assign:
                missing = left if left not in assign else right
                raise UnknownIdError(f"unknown world in link for player {player}: {node_label(missing)}")
            if game.observed(assign[left], player) != game.observed(assign[right], player):
                raise ModelValidationError(
                    f"indistinguishability violates game information: "
                    f"{node_label(left)} ~{player} {node_label(right)} but player {player} "
                    f"is told different things at {node_label(assign[left])} and {node_label(assign[right])}"
                )
        indist[player] = close_relation(worlds, pairs)
    for player in links:
        game.signature.require_player(player)

    return EpistemicModel(
        name=name,
        game=game,
        worlds=tuple(worlds),
        assign=dict(assign),
        indist=indist,
        point=point,
    )


def validate_epistemic(raw: ModelDescription, game: GameStructure) -> EpistemicModel:
    """Turn a parsed model description into a validated epistemic model."""
    assign: dict[Node, Node] = {}
    for entry in raw.worlds:
        if entry.world in assign:
            raise ModelValidationError(f"duplicate world id: {entry.world}")
        assign[entry.world] = entry.state
    links: dict[str, list[tuple[Node, Node]]] = {}
    for link in raw.links:
        game.signature.require_player(link.player)
        links.setdefault(link.player, []).append((link.left, link.right))
    return build_epistemic(game, assign, links, name=raw.name, point=raw.point)


def check_epistemic(model: EpistemicModel) -> None:
    """Re-check every epistemic-model invariant; raise InvariantViolation on failure."""
    game = model.game
    for world in model.worlds:
        if not game.has_state(model.assign[world]):
            raise InvariantViolation(f"world {node_label(world)} is not placed on a game state")
    for player in game.signature.players:
        partition = model.indist[player]
        if set(partition) != set(model.worlds):
            raise InvariantViolation(f"relation of player {player} does not cover the worlds")
        for world in model.worlds:
            cls = partition[world]
            if world not in cls:
                raise InvariantViolation(f"~{player} is not reflexive at {node_label(world)}")
            info = model.valuation(world, player)
            for other in cls:
                if partition.get(other) != cls:
                    raise InvariantViolation(
                        f"~{player} is not an equivalence around {node_label(world)}"
                    )
                if model.valuation(other, player) != info:
                    raise InvariantViolation(
                        f"~{player} links {node_label(world)} and {node_label(other)} "
                        "with different game information"
                    )


# =============================================================================
# Observation model
# =============================================================================


@dataclass(frozen=True)
class ObservationModel:
    """Per-player blur (indistinguishability) over the global action set."""

    name: str
    signature: Signature
    blur: Mapping[str, Mapping[str, frozenset[str]]]

    def blurred(self, player: str, left: str, right: str) -> bool:
        return right in self.blur[player][left]

    def blur_class(self, player: str, action: str) -> frozenset[str]:
        return self.blur[player][action]


def build_observation(
    signature: Signature,
    pairs: Mapping[str, Iterable[tuple[str, str]]],
    *,
    name: str = "observation",
) -> ObservationModel:
    """Close blur generator pairs per player; cross-player pairs are allowed."""
    blur: dict[str, dict[Node, frozenset[Node]]] = {}
    for player in pairs:
        if player not in signature.players:
            raise ObservationValidationError(f"blur declared for unknown player: {player}")
    for player in signature.players:
        player_pairs = list(pairs.get(player, ()))
        for left, right in player_pairs:
            for action in (left, right):
                if action not in signature.owners:
                    raise ObservationValidationError(f"blur names unknown action: {action}")
        blur[player] = close_relation(signature.actions, player_pairs)
    return ObservationModel(name=name, signature=signature, blur=blur)  # type: ignore[arg-type]


def identity_observation(signature: Signature, name: str = "public") -> ObservationModel:
    """The observation model in which every player tells every action apart."""
    return build_observation(signature, {}, name=name)


def validate_observation(raw: ObservationDescription, signature: Signature) -> ObservationModel:
    """Turn a parsed observation description into an observation model."""
    pairs: dict[str, list[tuple[str, str]]] = {}
    for link in raw.blurs:
        pairs.setdefault(link.player, []).append((link.left, link.right))
    return build_observation(signature, pairs, name=raw.name)


def require_same_signature(left: Signature, right: Signature, what: str) -> None:
    """Raise SignatureMismatchError unless the two signatures coincide."""
    if left != right:
        raise SignatureMismatchError(f"signature mismatch between {what}")
