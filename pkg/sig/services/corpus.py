"""Seeded random games, models, observation models and formulas.

Every generator takes a `random.Random`, so a seed reproduces the whole
instance.
"""

import random
from dataclasses import dataclass
from itertools import combinations

from sig.services.formula import (
    TOP,
    And,
    AtomAt,
    Box,
    Formula,
    Know,
    Not,
    diamond,
    disj,
    hat_k,
    implies,
)
from sig.services.game import (
    EpistemicModel,
    GameStructure,
    ObservationModel,
    Signature,
    build_epistemic,
    build_game,
    build_observation,
    make_signature,
)
from sig.services.worlds import Node

PLAYERS = ("1", "2")
ACTION_NAMES = ("a", "b", "c", "d")
ATOM_NAMES = ("p", "q", "r", "u")


@dataclass(frozen=True)
class Instance:
    """One game / initial model / observation triple."""

    seed: int
    game: GameStructure
    model: EpistemicModel
    observation: ObservationModel


def _subsets(items: tuple[str, ...]) -> list[frozenset[str]]:
    return [frozenset(c) for k in range(len(items) + 1) for c in combinations(items, k)]


def random_game(
    rng: random.Random,
    *,
    perfect_information: bool = False,
    max_states: int = 6,
    max_actions: int = 4,
    max_atoms: int = 4,
) -> GameStructure:
    """A game with two players; with `perfect_information` every player is told apart every pair of states."""
    n_states = rng.randint(1, max_states)
    n_actions = rng.randint(1, max_actions)
    n_atoms = rng.randint(0, max_atoms)
    if perfect_information:
        while 2**n_atoms < n_states:
            n_atoms += 1

    actions = ACTION_NAMES[:n_actions]
    owned: dict[str, list[str]] = {p: [] for p in PLAYERS}
    for action in actions:
        owned[rng.choice(PLAYERS)].append(action)
    signature = make_signature(PLAYERS, owned, ATOM_NAMES[:n_atoms])

    states = [f"s{k}" for k in range(n_states)]
    trans: dict[tuple[Node, str], Node] = {}
    for state in states:
        movers = [p for p in PLAYERS if owned[p]]
        if rng.random() < 0.25:
            continue
        player = rng.choice(movers)
        chosen = [a for a in owned[player] if rng.random() < 0.6] or [rng.choice(owned[player])]
        for action in chosen:
            trans[(state, action)] = rng.choice(states)

    info: dict[tuple[Node, str], frozenset[str]] = {}
    pool = _subsets(signature.user_atoms)
    for player in PLAYERS:
        if perfect_information:
            picked = rng.sample(pool, n_states)
        else:
            picked = [rng.choice(pool) for _ in states]
        for state, atoms in zip(states, picked, strict=True):
            info[(state, player)] = atoms

    return build_game(signature, states, trans, info, name=f"random{n_states}")


def random_epistemic(
    rng: random.Random, game: GameStructure, *, max_worlds: int = 3, certainty: bool = False
) -> EpistemicModel:
    """Worlds on random states, each O-compatible pair linked with probability one half."""
    n_worlds = 1 if certainty else rng.randint(1, max_worlds)
    assign = {f"w{k}": rng.choice(game.states) for k in range(n_worlds)}
    worlds = sorted(assign)
    links: dict[str, list[tuple[Node, Node]]] = {}
    for player in game.signature.players:
        for left, right in combinations(worlds, 2):
            same = game.observed(assign[left], player) == game.observed(assign[right], player)
            if same and rng.random() < 0.5:
                links.setdefault(player, []).append((left, right))
    return build_epistemic(game, assign, links, name="init")


def random_observation(rng: random.Random, signature: Signature, *, blur: float = 0.3) -> ObservationModel:
    """Each pair of actions (owners ignored) is blurred for each player with probability `blur`."""
    pairs: dict[str, list[tuple[str, str]]] = {}
    for player in signature.players:
        for left, right in combinations(signature.actions, 2):
            if rng.random() < blur:
                pairs.setdefault(player, []).append((left, right))
    return build_observation(signature, pairs, name="obs")


def random_instance(seed: int, *, perfect_information: bool = False, certainty: bool = False) -> Instance:
    rng = random.Random(seed)
    game = random_game(rng, perfect_information=perfect_information)
    model = random_epistemic(rng, game, certainty=certainty)
    observation = random_observation(rng, game.signature)
    return Instance(seed=seed, game=game, model=model, observation=observation)


_CONNECTIVES = ("atom", "top", "not", "and", "or", "implies", "know", "hatk", "box", "diamond")


def random_formula(rng: random.Random, signature: Signature, depth: int) -> Formula:
    """A formula of nesting depth at most `depth`, connectives drawn uniformly."""
    kind = rng.choice(_CONNECTIVES[:2] if depth <= 0 else _CONNECTIVES)
    if kind == "top":
        return TOP
    if kind == "atom":
        return AtomAt(rng.choice(signature.atoms), rng.choice(signature.players))
    sub = depth - 1
    match kind:
        case "not":
            return Not(random_formula(rng, signature, sub))
        case "and":
            return And(random_formula(rng, signature, sub), random_formula(rng, signature, sub))
        case "or":
            return disj(random_formula(rng, signature, sub), random_formula(rng, signature, sub))
        case "implies":
            return implies(random_formula(rng, signature, sub), random_formula(rng, signature, sub))
        case "know":
            return Know(rng.choice(signature.players), random_formula(rng, signature, sub))
        case "hatk":
            return hat_k(rng.choice(signature.players), random_formula(rng, signature, sub))
        case "box":
            return Box(rng.choice(signature.actions), random_formula(rng, signature, sub))
        case _:
            return diamond(rng.choice(signature.actions), random_formula(rng, signature, sub))


def random_formulas(seed: int, signature: Signature, count: int, depth: int) -> list[Formula]:
    rng = random.Random(seed)
    return [random_formula(rng, signature, depth) for _ in range(count)]
