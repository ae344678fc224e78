"""Line-oriented file formats for games, models, observation models and ETL models.

Every format is whitespace separated, `#` starts a comment, the first
line names the object and `end` closes it.
"""

import logging
from collections.abc import Iterator
from pathlib import Path

from sig.errors import FormatError
from sig.models.descriptions import (
    ETLDescription,
    GameDescription,
    Link,
    ModelDescription,
    Observation,
    ObservationDescription,
    Transition,
    ValuationEntry,
    WorldAssignment,
)
from sig.services.game import ACTION_ATOM_PREFIX, EpistemicModel, GameStructure, ObservationModel, partition_pairs
from sig.services.update import ETLModel
from sig.services.worlds import node_label, ordered, unique_labels

logger = logging.getLogger(__name__)


class _Reader:
    """Yields (line number, keyword, rest tokens) and enforces the header/end framing."""

    def __init__(self, text: str, source: str) -> None:
        self.source = source
        self.lines: list[tuple[int, list[str]]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            content = raw.split("#", 1)[0].strip()
            if content:
                self.lines.append((number, content.split()))

    def error(self, message: str, line: int | None = None) -> FormatError:
        return FormatError(message, line, self.source)

    def header(self, keyword: str) -> tuple[int, list[str]]:
        if not self.lines:
            raise self.error(f"empty file, expected '{keyword}'")
        number, tokens = self.lines[0]
        if tokens[0] != keyword:
            raise self.error(f"expected '{keyword}', got '{tokens[0]}'", number)
        return number, tokens[1:]

    def body(self) -> Iterator[tuple[int, str, list[str]]]:
        ended = False
        for number, tokens in self.lines[1:]:
            if ended:
                raise self.error("content after 'end'", number)
            if tokens[0] == "end":
                if len(tokens) > 1:
                    raise self.error("'end' takes no arguments", number)
                ended = True
                continue
            yield number, tokens[0], tokens[1:]
        if not ended:
            raise self.error("missing 'end'")

    def owned(self, number: int, rest: list[str]) -> tuple[str, list[str]]:
        """Split `<player>: x y ...` (the colon may be attached or separate)."""
        text = " ".join(rest)
        if ":" not in text:
            raise self.error("expected '<player>: ...'", number)
        owner, items = text.split(":", 1)
        owner = owner.strip()
        if not owner or " " in owner:
            raise self.error(f"bad player id '{owner}'", number)
        return owner, items.split()

    def arity(self, number: int, keyword: str, rest: list[str], count: int) -> list[str]:
        if len(rest) != count:
            raise self.error(f"'{keyword}' takes {count} arguments, got {len(rest)}", number)
        return rest


# =============================================================================
# Parsers
# =============================================================================


def parse_game(text: str, source: str = "<game>") -> GameDescription:
    reader = _Reader(text, source)
    number, rest = reader.header("game")
    (name,) = reader.arity(number, "game", rest, 1)
    players: list[str] = []
    actions: dict[str, list[str]] = {}
    atoms: list[str] = []
    states: list[str] = []
    transitions: list[Transition] = []
    observations: list[Observation] = []
    for number, keyword, rest in reader.body():
        match keyword:
            case "players":
                players.extend(rest)
            case "actions":
                owner, items = reader.owned(number, rest)
                actions.setdefault(owner, []).extend(items)
            case "atoms":
                atoms.extend(rest)
            case "states":
                states.extend(rest)
            case "trans":
                source_state, action, target = reader.arity(number, "trans", rest, 3)
                transitions.append(Transition(source=source_state, action=action, target=target))
            case "obs":
                if not rest:
                    raise reader.error("'obs' needs a state", number)
                owner, items = reader.owned(number, rest[1:])
                observations.append(Observation(state=rest[0], player=owner, atoms=items))
            case _:
                raise reader.error(f"unknown keyword '{keyword}'", number)
    if not players:
        raise reader.error("no 'players' line")
    if not states:
        raise reader.error("no 'states' line")
    return GameDescription(
        name=name,
        players=players,
        actions=actions,
        atoms=atoms,
        states=states,
        transitions=transitions,
        observations=observations,
    )


def parse_model(text: str, source: str = "<model>") -> ModelDescription:
    reader = _Reader(text, source)
    number, rest = reader.header("model")
    if len(rest) != 3 or rest[1] != "over":
        raise reader.error("expected 'model <name> over <game>'", number)
    name, _, game = rest
    worlds: list[WorldAssignment] = []
    links: list[Link] = []
    point: str | None = None
    for number, keyword, rest in reader.body():
        match keyword:
            case "worlds":
                for item in rest:
                    world, sep, state = item.partition(":")
                    if not sep or not world or not state:
                        raise reader.error(f"expected '<world>:<state>', got '{item}'", number)
                    worlds.append(WorldAssignment(world=world, state=state))
            case "link":
                owner, items = reader.owned(number, rest)
                if len(items) != 2:
                    raise reader.error("'link' takes a player and two worlds", number)
                links.append(Link(player=owner, left=items[0], right=items[1]))
            case "point":
                (point,) = reader.arity(number, "point", rest, 1)
            case _:
                raise reader.error(f"unknown keyword '{keyword}'", number)
    if not worlds:
        raise reader.error("no 'worlds' line")
    return ModelDescription(name=name, game=game, worlds=worlds, links=links, point=point)


def parse_observation(text: str, source: str = "<observation>") -> ObservationDescription:
    reader = _Reader(text, source)
    number, rest = reader.header("obsmodel")
    (name,) = reader.arity(number, "obsmodel", rest, 1)
    blurs: list[Link] = []
    for number, keyword, rest in reader.body():
        if keyword != "blur":
            raise reader.error(f"unknown keyword '{keyword}'", number)
        owner, items = reader.owned(number, rest)
        if len(items) != 2:
            raise reader.error("'blur' takes a player and two actions", number)
        blurs.append(Link(player=owner, left=items[0], right=items[1]))
    return ObservationDescription(name=name, blurs=blurs)


def parse_etl(text: str, source: str = "<etl>") -> ETLDescription:
    reader = _Reader(text, source)
    number, rest = reader.header("etl")
    (name,) = reader.arity(number, "etl", rest, 1)
    players: list[str] = []
    actions: dict[str, list[str]] = {}
    atoms: list[str] = []
    worlds: list[str] = []
    transitions: list[Transition] = []
    valuation: list[ValuationEntry] = []
    links: list[Link] = []
    frontier: list[str] = []
    for number, keyword, rest in reader.body():
        match keyword:
            case "players":
                players.extend(rest)
            case "actions":
                owner, items = reader.owned(number, rest)
                actions.setdefault(owner, []).extend(items)
            case "atoms":
                atoms.extend(rest)
            case "worlds":
                worlds.extend(rest)
            case "trans":
                source_world, action, target = reader.arity(number, "trans", rest, 3)
                transitions.append(Transition(source=source_world, action=action, target=target))
            case "val":
                if not rest:
                    raise reader.error("'val' needs a world", number)
                owner, items = reader.owned(number, rest[1:])
                valuation.append(ValuationEntry(world=rest[0], player=owner, atoms=items))
            case "link":
                owner, items = reader.owned(number, rest)
                if len(items) != 2:
                    raise reader.error("'link' takes a player and two worlds", number)
                links.append(Link(player=owner, left=items[0], right=items[1]))
            case "frontier":
                frontier.extend(rest)
            case _:
                raise reader.error(f"unknown keyword '{keyword}'", number)
    if not players:
        raise reader.error("no 'players' line")
    return ETLDescription(
        name=name,
        players=players,
        actions=actions,
        atoms=atoms,
        worlds=worlds,
        transitions=transitions,
        valuation=valuation,
        links=links,
        frontier=frontier,
    )


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def load_game(path: str | Path) -> GameDescription:
    return parse_game(read_text(path), str(path))


def load_model(path: str | Path) -> ModelDescription:
    return parse_model(read_text(path), str(path))


def load_observation(path: str | Path) -> ObservationDescription:
    return parse_observation(read_text(path), str(path))


def load_etl(path: str | Path) -> ETLDescription:
    return parse_etl(read_text(path), str(path))


# =============================================================================
# Renderers
# =============================================================================


def render_game(game: GameStructure) -> str:
    """Canonical game file; action atoms are left implicit."""
    sig = game.signature
    lines = [f"game {game.name}", f"players {' '.join(sig.players)}"]
    for player in sig.players:
        owned = sig.actions_of(player)
        if owned:
            lines.append(f"actions {player}: {' '.join(owned)}")
    if sig.user_atoms:
        lines.append(f"atoms {' '.join(sig.user_atoms)}")
    lines.append(f"states {' '.join(node_label(s) for s in game.states)}")
    for state in game.states:
        for action in game.enabled_at(state):
            target = game.successor(state, action)
            lines.append(f"trans {node_label(state)} {action} {node_label(target)}")
    for state in game.states:
        for player in sig.players:
            atoms = sorted(p for p in game.observed(state, player) if not p.startswith(ACTION_ATOM_PREFIX))
            if atoms:
                lines.append(f"obs {node_label(state)} {player}: {' '.join(atoms)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_model(model: EpistemicModel) -> str:
    """Model file with world labels as ids and one link per related pair."""
    labels = unique_labels(model.worlds)
    lines = [f"model {model.name} over {model.game.name}"]
    if model.worlds:
        lines.append(
            "worlds " + " ".join(f"{labels[w]}:{node_label(model.assign[w])}" for w in model.worlds)
        )
    for player in model.signature.players:
        for left, right in partition_pairs(model.indist[player]):
            lines.append(f"link {player}: {labels[left]} {labels[right]}")
    if model.point is not None:
        lines.append(f"point {labels[model.point]}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_observation(observation: ObservationModel) -> str:
    lines = [f"obsmodel {observation.name}"]
    for player in observation.signature.players:
        for left, right in partition_pairs(observation.blur[player]):
            lines.append(f"blur {player}: {left} {right}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_etl(model: ETLModel) -> str:
    """ETL file; action atoms are written explicitly and every non-reflexive pair is listed."""
    sig = model.signature
    label = model.label
    lines = [f"etl {model.name.replace(' ', '_')}", f"players {' '.join(sig.players)}"]
    for player in sig.players:
        owned = sig.actions_of(player)
        if owned:
            lines.append(f"actions {player}: {' '.join(owned)}")
    if sig.user_atoms:
        lines.append(f"atoms {' '.join(sig.user_atoms)}")
    lines.append(f"worlds {' '.join(label(w) for w in model.worlds)}")
    for world in model.worlds:
        for action in sig.actions:
            for target in ordered(model.successors(action, world)):
                lines.append(f"trans {label(world)} {action} {label(target)}")
    for world in model.worlds:
        for player in sig.players:
            atoms = sorted(model.observed(world, player))
            if atoms:
                lines.append(f"val {label(world)} {player}: {' '.join(atoms)}")
    for player in sig.players:
        for world in model.worlds:
            for other in ordered(model.alternatives(player, world)):
                if label(world) < label(other):
                    lines.append(f"link {player}: {label(world)} {label(other)}")
    if model.frontier:
        lines.append(f"frontier {' '.join(label(w) for w in ordered(model.frontier))}")
    lines.append("end")
    return "\n".join(lines) + "\n"
